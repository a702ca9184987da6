use boettcher_core::boettcher::compute_xi;
use boettcher_core::numeric::{int, newton_polygon, parse_rational, rat, LocalElem, PadicError, Rational, Valuation};
use boettcher_core::padic::*;
use boettcher_core::random::{random_correspondence, rng_for};
use boettcher_core::series::{Correspondence, Monomial, SeriesRing, WeightedSeries};
use num_traits::Signed;
use proptest::prelude::*;

const P: u64 = 5;
const N: u32 = 60;

fn corr(f: &[i64], g: &[i64]) -> Correspondence {
    Correspondence::from_ints(f, g).unwrap()
}

fn worked() -> Correspondence {
    corr(&[1, 1, 0, 1], &[1, 0, 1])
}

fn bad() -> Correspondence {
    Correspondence::new(vec![int(0), rat(1, 5), int(0), int(1)], vec![int(0), int(0), int(1)]).unwrap()
}

fn elem(r: Rational) -> LocalElem {
    LocalElem::from_rational(&r, P, 1, N)
}

fn val(x: &LocalElem) -> Rational {
    x.valuation().finite().cloned().expect("certified valuation")
}

/// Least weight above `t` by enumerating exponent vectors directly.
fn brute_least_weight_above(e: usize, d: usize, t: &Rational) -> Rational {
    let top = t.floor() + int(1);
    let mut weights = vec![int(0)];
    let mut i = 0u32;
    loop {
        let wi = Rational::new((d as i64).pow(i).into(), (e as i64).pow(i).into());
        if wi > top {
            break;
        }
        let max_k = if i == 0 { 64 } else { e as i64 - 1 };
        let mut next = Vec::new();
        for w in &weights {
            for k in 0..=max_k {
                let cand = w + &wi * int(k);
                if cand > top {
                    break;
                }
                next.push(cand);
            }
        }
        weights = next;
        i += 1;
    }
    weights.into_iter().filter(|w| w > t).min().unwrap()
}

#[test]
fn good_reduction_examples() {
    assert!(check_good_reduction(&worked(), 5));
    assert!(!check_good_reduction(&bad(), 5));
    assert!(!check_good_reduction(&worked(), 3));
    assert!(!check_good_reduction(&worked(), 2));
    assert!(check_good_reduction(&worked(), 7));
}

#[test]
fn radius_examples() {
    assert_eq!(convergence_radius(&worked(), 5), int(0));
    assert_eq!(convergence_radius(&bad(), 5), rat(1, 2));
    let deep = corr(&[125, 25, 0, 1], &[0, 0, 1]);
    assert_eq!(convergence_radius(&deep, 5), int(0));
    let g_pole = Correspondence::new(vec![int(0), int(0), int(0), int(1)], vec![rat(1, 25), int(0), int(1)]).unwrap();
    assert_eq!(convergence_radius(&g_pole, 5), rat(2, 3));
}

/// Smallest `s` on a grid for which every coefficient of the scaled maps along `v(α_i) = s (d/e)^i` is integral.
fn brute_radius(e: i64, d: i64, va: &[Option<i64>], vb: &[Option<i64>]) -> Rational {
    let grid = 2 * 3 * 4 * 5 * 7 * d * e;
    for n in 0..=grid * 20 {
        let s = Rational::new(n.into(), grid.into());
        let ok = (0..6).all(|i| {
            let vi = &s * Rational::new(d.pow(i).into(), e.pow(i).into());
            let f_ok = va.iter().enumerate().all(|(j, v)| v.is_none_or(|v| &vi * int(d - j as i64) + int(v) >= int(0)));
            let g_ok = i == 0 || vb.iter().enumerate().all(|(j, v)| v.is_none_or(|v| &vi * int(e - j as i64) + int(v) >= int(0)));
            f_ok && g_ok
        });
        if ok {
            return s;
        }
    }
    panic!("grid too small");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn radius_matches_grid_search(ed in prop::sample::select(vec![(1i64, 2i64), (2, 3), (1, 3), (3, 4)]), vs in prop::collection::vec(-3i64..=3, 7)) {
        let (e, d) = ed;
        let coeff = |v: i64| if v == 3 { int(0) } else { Rational::new(2.into(), 1.into()) * Rational::from_integer(num_bigint::BigInt::from(5)).pow(v as i32) };
        let mut f: Vec<Rational> = (0..d as usize).map(|j| coeff(vs[j])).collect();
        f.push(int(1));
        let mut g: Vec<Rational> = (0..e as usize).map(|j| coeff(vs[d as usize + j])).collect();
        g.push(int(1));
        let va: Vec<Option<i64>> = (0..d as usize).map(|j| (vs[j] != 3).then_some(vs[j])).collect();
        let vb: Vec<Option<i64>> = (0..e as usize).map(|j| vs[d as usize + j]).map(|v| (v != 3).then_some(v)).collect();
        let c = Correspondence::new(f, g).unwrap();
        prop_assert_eq!(convergence_radius(&c, 5), brute_radius(e, d, &va, &vb));
    }
}

#[test]
fn single_valued_path_is_rational_orbit() {
    let c = corr(&[1, 0, 1], &[0, 1]);
    let path = forward_path_search(&c, &elem(rat(1, 5)), 3).unwrap();
    let mut x = rat(1, 5);
    for a in path.coords() {
        assert_eq!(a.exact_value(), Some(&x));
        x = &x * &x + int(1);
    }
}

#[test]
fn power_map_path_is_exact() {
    let (e, d, n) = (2u32, 3u32, 3u32);
    let b = Correspondence::power_maps(e as usize, d as usize);
    let a0 = rat(1, 5i64.pow(e.pow(n)));
    let path = forward_path_search(&b, &elem(a0), n as usize).unwrap();
    for (i, a) in path.coords().iter().enumerate() {
        let expect = -int((d.pow(i as u32) * e.pow(n - i as u32)) as i64);
        assert_eq!(val(a), expect);
        assert_eq!(a.ramification(), 1);
    }
}

#[test]
fn ramification_is_raised_on_demand() {
    let c = worked();
    let a0 = elem(rat(1, 5));
    let err = forward_path_search_within(&c, &a0, 1, 0).unwrap_err();
    assert!(matches!(err, EvalError::Padic(PadicError::NoRootInField(_))), "{err}");
    let path = forward_path_search_within(&c, &a0, 1, 1).unwrap();
    assert_eq!(path.coords()[1].tower_level(2), Some(1));
    assert_eq!(val(&path.coords()[1]), rat(-3, 2));
    assert!(forward_path_search(&c, &elem(int(5)), 1).is_err());
}

#[test]
fn path_condition_holds() {
    let c = worked();
    let path = forward_path_search(&c, &elem(rat(1, 625)), 6).unwrap();
    let rebuilt = PathPoint::new(&c, path.coords().to_vec()).unwrap();
    assert_eq!(rebuilt, path);
    let mut broken = path.coords().to_vec();
    broken[2] = broken[2].neg().add(&elem(int(1))).unwrap();
    assert_eq!(PathPoint::new(&c, broken), Err(EvalError::NotAPath(1)));
    let json = serde_json::to_value(path.to_json()).unwrap();
    assert_eq!(json["coords"][3]["valuation"], "-27/2");
    assert_eq!(json["coords"][3]["tower_level"], 1);
}

#[test]
fn evaluation_of_leading_term() {
    let b = Correspondence::power_maps(2, 3);
    let path = forward_path_search(&b, &elem(rat(1, 25)), 2).unwrap();
    let ring = SeriesRing::source(&b, &int(12));
    let value = evaluate_series_at_path(&WeightedSeries::var(&ring, 0), &path).unwrap();
    assert_eq!(value.value.exact_value(), Some(&int(25)));
    assert_eq!(value.tail_bound, None);
}

#[test]
fn tail_bound_formula() {
    let c = worked();
    let path = forward_path_search(&c, &elem(rat(1, 625)), 8).unwrap();
    for x in [4, 8, 12] {
        let (xi, _) = compute_xi(&c, &int(x));
        let got = evaluate_series_at_path(&xi, &path).unwrap();
        let xp = brute_least_weight_above(2, 3, &int(x));
        assert_eq!(least_weight_above(2, 3, &int(x)), xp);
        assert_eq!(got.tail_bound, Some(xp * int(4)));
        assert_eq!(val(&got.value), int(4));
    }
    assert_eq!(least_weight_above(2, 3, &int(4)), rat(17, 4));
}

#[test]
fn partial_sums_are_within_tail_bound() {
    for (c, a0) in [(worked(), rat(1, 625)), (bad(), rat(1, 25))] {
        let path = forward_path_search(&c, &elem(a0), 8).unwrap();
        let sums: Vec<SeriesValue> = [4, 8, 12]
            .iter()
            .map(|&x| evaluate_series_at_path(&compute_xi(&c, &int(x)).0, &path).unwrap())
            .collect();
        for w in sums.windows(2) {
            let diff = w[1].value.sub(&w[0].value).unwrap();
            let lower = match diff.valuation() {
                Valuation::Finite(v) | Valuation::AtLeast(v) => v,
                Valuation::Infinite => continue,
            };
            assert!(lower >= w[0].tail_bound.clone().unwrap());
        }
    }
}

#[test]
fn evaluation_errors() {
    let c = bad();
    let ring = SeriesRing::source(&c, &int(12));
    let on_edge = LocalElem::uniformizer(P, 2, N).inv().unwrap();
    let path = PathPoint::new(&c, vec![on_edge]).unwrap();
    let err = evaluate_series_at_path(&WeightedSeries::var(&ring, 0), &path).unwrap_err();
    assert!(matches!(err, EvalError::DivergenceRegion { .. }));
    let short = forward_path_search(&worked(), &elem(rat(1, 625)), 1).unwrap();
    let deep = WeightedSeries::from_terms(&SeriesRing::source(&worked(), &int(12)), vec![(Monomial::var(3), int(1))]);
    assert_eq!(evaluate_series_at_path(&deep, &short).unwrap_err(), EvalError::PathTooShort { needed: 4, have: 2 });
}

#[test]
fn numeric_conjugacy_examples() {
    let b = Correspondence::power_maps(2, 3);
    let path = forward_path_search(&b, &elem(rat(1, 5i64.pow(16))), 4).unwrap();
    let report = verify_numeric_conjugacy(&b, &path, &int(12)).unwrap();
    assert!(report.passed);
    assert_eq!(report.residual_valuation, "inf");

    let c = worked();
    let path = forward_path_search(&c, &elem(rat(1, 625)), 10).unwrap();
    let mut last = None;
    for x in [4, 8, 12] {
        let report = verify_numeric_conjugacy(&c, &path, &int(x)).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.valuation_base, "4/1");
        let got = parse_rational(&report.residual_valuation).unwrap();
        if let Some(prev) = last {
            assert!(got >= prev);
        }
        last = Some(got);
    }

    let path = forward_path_search(&bad(), &elem(rat(1, 25)), 8).unwrap();
    assert!(verify_numeric_conjugacy(&bad(), &path, &int(8)).unwrap().passed);
}

#[test]
fn norm_identity_examples() {
    let c = worked();
    let path = forward_path_search(&c, &elem(rat(1, 5)), 1).unwrap();
    let r = verify_norm_identity(&c, &path);
    assert!(r.passed && r.good_reduction);
    assert_eq!(r.steps[0].lhs, "-3/1");
    let trivial = PathPoint::new(&c, vec![elem(int(0)), elem(int(0))]).unwrap();
    let r = verify_norm_identity(&c, &trivial);
    assert!(r.passed);
    assert_eq!((r.steps[0].lhs.as_str(), r.steps[0].rhs.as_str()), ("0/1", "0/1"));
    let path = forward_path_search(&c, &elem(rat(1, 25)), 1).unwrap();
    assert_eq!(val(&path.coords()[1]), int(-3));
}

#[test]
fn preimage_valuations_from_newton_polygon() {
    let c = worked();
    for beta in [rat(1, 5), rat(2, 625), rat(3, 25)] {
        let vb = rat(-1, 1) * int(rational_val(&beta));
        let gb = boettcher_core::numeric::eval_rational_poly(c.g_coeffs(), &elem(beta.clone())).unwrap();
        let mut poly: Vec<LocalElem> = c.f_coeffs().iter().map(|a| elem(a.clone())).collect();
        poly[0] = poly[0].sub(&gb).unwrap();
        let polygon = newton_polygon(&poly).unwrap();
        let expect = vb * rat(2, 3);
        assert_eq!(polygon.root_valuations(), vec![(expect, 3)]);
    }
}

fn rational_val(r: &Rational) -> i64 {
    boettcher_core::numeric::rational::rational_valuation(r, P).unwrap().abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn path_valuations_cascade(seed in 0u64..1000, ed in prop::sample::select(vec![(1usize, 2usize), (2, 3), (1, 3), (2, 5)]), k in 1i64..4, u in 1i64..25) {
        let (e, d) = ed;
        let mut rng = rng_for(seed, e, d);
        let c = random_correspondence(&mut rng, e, d);
        prop_assume!(u % 5 != 0 && check_good_reduction(&c, P));
        let a0 = elem(Rational::new(u.into(), 5i64.pow(k as u32).into()));
        let path = match forward_path_search(&c, &a0, 3) {
            Ok(p) => p,
            Err(EvalError::Padic(PadicError::NoRootInField(_))) => return Ok(()),
            Err(other) => panic!("{other}"),
        };
        for w in path.coords().windows(2) {
            prop_assert_eq!(val(&w[1]), predicted_valuation(&c, &val(&w[0])));
        }
        prop_assert!(verify_norm_identity(&c, &path).passed);
        let (xi, _) = compute_xi(&c, &int(4));
        let value = evaluate_series_at_path(&xi, &path).unwrap();
        prop_assert_eq!(val(&value.value), int(k));
        prop_assert!(!value.tail_bound.unwrap().is_negative());
    }
}

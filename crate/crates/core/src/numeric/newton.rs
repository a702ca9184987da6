use num_bigint::BigInt;
use serde::Serialize;

use super::local::{LocalElem, PadicError, Valuation};
use super::rational::{format_rational, Rational};

/// Lower convex hull of `(i, v(c_i))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, Rational)>,
    /// `(slope, length)` with strictly increasing slopes.
    pub slopes: Vec<(Rational, usize)>,
}

#[derive(Serialize)]
struct SlopeJson {
    slope: String,
    length: usize,
}

impl NewtonPolygon {
    /// Root valuations with multiplicity, as `(valuation, count)`, largest valuation first.
    pub fn root_valuations(&self) -> Vec<(Rational, usize)> {
        self.slopes.iter().map(|(s, l)| (-s.clone(), *l)).collect()
    }

    /// The steepest-descending segment is the one of smallest root valuation.
    pub fn dominant(&self) -> Option<&(Rational, usize)> {
        self.slopes.last()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let slopes: Vec<SlopeJson> = self
            .slopes
            .iter()
            .map(|(s, l)| SlopeJson { slope: format_rational(s), length: *l })
            .collect();
        serde_json::json!({
            "vertices": self.vertices.iter().map(|(i, v)| serde_json::json!([i, format_rational(v)])).collect::<Vec<_>>(),
            "slopes": slopes,
        })
    }

    fn height_at(&self, i: usize) -> Option<Rational> {
        let w = self.vertices.windows(2).find(|w| w[0].0 <= i && i <= w[1].0)?;
        let (i0, v0) = &w[0];
        let (i1, v1) = &w[1];
        let t = Rational::new(BigInt::from(i - i0), BigInt::from(i1 - i0));
        Some(v0 + (v1 - v0) * t)
    }
}

fn cross(o: &(usize, Rational), a: &(usize, Rational), b: &(usize, Rational)) -> Rational {
    let ax = Rational::from_integer(BigInt::from(a.0 as i64 - o.0 as i64));
    let bx = Rational::from_integer(BigInt::from(b.0 as i64 - o.0 as i64));
    ax * (&b.1 - &o.1) - (&a.1 - &o.1) * bx
}

/// Newton polygon of `Σ poly[i] x^i`.
pub fn newton_polygon(poly: &[LocalElem]) -> Result<NewtonPolygon, PadicError> {
    let lead = poly.last().ok_or_else(|| PadicError::PrecisionExhausted("empty polynomial".into()))?;
    if !matches!(lead.valuation(), Valuation::Finite(_)) {
        return Err(PadicError::PrecisionExhausted("leading coefficient not certified nonzero".into()));
    }
    let mut points = Vec::new();
    let mut bounds = Vec::new();
    for (i, c) in poly.iter().enumerate() {
        match c.valuation() {
            Valuation::Finite(v) => points.push((i, v)),
            Valuation::AtLeast(b) => bounds.push((i, b)),
            Valuation::Infinite => {}
        }
    }
    let mut hull: Vec<(usize, Rational)> = Vec::new();
    for pt in points {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &pt) <= Rational::from_integer(0.into()) {
            hull.pop();
        }
        hull.push(pt);
    }
    let slopes = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            ((&w[1].1 - &w[0].1) / Rational::from_integer(BigInt::from(len)), len)
        })
        .collect();
    let polygon = NewtonPolygon { vertices: hull, slopes };
    for (i, b) in bounds {
        match polygon.height_at(i) {
            Some(h) if b >= h => {}
            _ => {
                return Err(PadicError::PrecisionExhausted(format!(
                    "coefficient {i} is O(p^{}) and may lie below the hull",
                    format_rational(&b)
                )))
            }
        }
    }
    Ok(polygon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{int, rat};

    fn q(coeffs: &[Rational], p: u64) -> Vec<LocalElem> {
        coeffs.iter().map(|c| LocalElem::from_rational(c, p, 1, 20)).collect()
    }

    #[test]
    fn pure_ramified_quadratic() {
        let np = newton_polygon(&q(&[int(-5), int(0), int(1)], 5)).unwrap();
        assert_eq!(np.slopes, vec![(rat(-1, 2), 2)]);
        assert_eq!(np.root_valuations(), vec![(rat(1, 2), 2)]);
    }

    #[test]
    fn split_linear_factors() {
        // (x - 1)(x - 5) = x^2 - 6x + 5
        let np = newton_polygon(&q(&[int(5), int(-6), int(1)], 5)).unwrap();
        assert_eq!(np.slopes, vec![(int(-1), 1), (int(0), 1)]);
    }

    #[test]
    fn large_constant_term() {
        // x^3 + x + 1 - c with v(c) = -2
        let c = rat(1, 25);
        let np = newton_polygon(&q(&[int(1) - c, int(1), int(0), int(1)], 5)).unwrap();
        assert_eq!(np.vertices, vec![(0, int(-2)), (3, int(0))]);
        assert_eq!(np.root_valuations(), vec![(rat(-2, 3), 3)]);
    }

    #[test]
    fn unit_multiple_has_same_slopes() {
        let base = q(&[int(5), int(-6), int(1)], 5);
        let u = LocalElem::from_int(3, 5, 1, 20);
        let scaled: Vec<_> = base.iter().map(|c| c.mul(&u).unwrap()).collect();
        assert_eq!(newton_polygon(&base).unwrap().slopes, newton_polygon(&scaled).unwrap().slopes);
    }

    #[test]
    fn uncertified_coefficient() {
        let mut poly = q(&[int(5), int(0), int(1)], 5);
        poly[0] = LocalElem::from_rational_with_precision(&int(0), 5, 1, 1, 20);
        assert!(matches!(newton_polygon(&poly), Err(PadicError::PrecisionExhausted(_))));
        let poly = vec![
            LocalElem::from_int(1, 5, 1, 20),
            LocalElem::from_rational_with_precision(&int(0), 5, 1, 6, 20),
            LocalElem::from_int(1, 5, 1, 20),
        ];
        assert_eq!(newton_polygon(&poly).unwrap().slopes, vec![(int(0), 2)]);
    }
}

//! Exact rationals and p-adic arithmetic in the tower `Q_p(p^{1/E})`.

pub mod hensel;
pub mod local;
pub mod newton;
pub mod rational;

pub use hensel::{hensel_lift, nth_root};
pub use local::{eval_poly, eval_rational_poly, padic_arith, ArithOp, LocalElem, PadicError, PadicScalar, Valuation};
pub use newton::{newton_polygon, NewtonPolygon};
pub use rational::{format_rational, parse_rational, rat, int, Rational, RationalParseError};

//! Scalar abstraction over payoff and cost values.
//!
//! Every game type is generic over [`Scalar`]. The exact instantiations
//! ([`num_rational::Ratio<i64>`] and [`num_rational::BigRational`]) make all
//! equilibrium conditions exact identities; `f32`/`f64` are supported for
//! quick experiments and compare with a small absolute tolerance.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed};

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    /// Equality used when checking identities such as "sums to one".
    /// Exact for rationals, tolerance-based for floats.
    fn near(&self, other: &Self) -> bool;

    /// Canonical text form: `"p/q"` or `"p"` for rationals, decimal for floats.
    fn to_text(&self) -> String;

    /// Accepts `"p/q"`, `"p"`, and (for floats only) decimal literals.
    fn parse_text(s: &str) -> Option<Self>;

    fn is_exact() -> bool;
}

/// Total order on scalars; incomparable floats (NaN) compare equal.
pub fn cmp<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

pub fn max_of<S: Scalar>(values: impl IntoIterator<Item = S>) -> Option<S> {
    values.into_iter().fold(None, |best: Option<S>, v| match best {
        Some(b) if cmp(&b, &v) != Ordering::Less => Some(b),
        _ => Some(v),
    })
}

fn split_ratio(s: &str) -> Option<(&str, &str)> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => Some((p.trim(), q.trim())),
        None => Some((s, "1")),
    }
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }
            fn near(&self, other: &Self) -> bool {
                (self - other).abs() <= $tol
            }
            fn to_text(&self) -> String {
                format!("{}", self)
            }
            fn parse_text(s: &str) -> Option<Self> {
                let (p, q) = split_ratio(s)?;
                let p: $t = p.parse().ok()?;
                let q: $t = q.parse().ok()?;
                if q == 0.0 {
                    return None;
                }
                Some(p / q)
            }
            fn is_exact() -> bool {
                false
            }
        }
    };
}

float_scalar!(f32, 1e-5);
float_scalar!(f64, 1e-9);

impl Scalar for Ratio<i64> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
    fn near(&self, other: &Self) -> bool {
        self == other
    }
    fn to_text(&self) -> String {
        if *self.denom() == 1 {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn parse_text(s: &str) -> Option<Self> {
        let (p, q) = split_ratio(s)?;
        let p: i64 = p.parse().ok()?;
        let q: i64 = q.parse().ok()?;
        (q != 0).then(|| Ratio::new(p, q))
    }
    fn is_exact() -> bool {
        true
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }
    fn near(&self, other: &Self) -> bool {
        self == other
    }
    fn to_text(&self) -> String {
        if self.denom() == &BigInt::from(1) {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn parse_text(s: &str) -> Option<Self> {
        let (p, q) = split_ratio(s)?;
        let p: BigInt = p.parse().ok()?;
        let q: BigInt = q.parse().ok()?;
        (q != BigInt::from(0)).then(|| Ratio::new(p, q))
    }
    fn is_exact() -> bool {
        true
    }
}

//! Positive definite binary quadratic forms: reduction, class numbers, and the
//! weighted class number `h_w` that enters the elliptic term of the trace formula.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{isqrt, rat, rat_int, Rat};

/// Negative discriminant `b^2 - 4ac`, congruent to 0 or 1 mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(value: i64) -> Result<Self> {
        if value >= 0 || !matches!(value.rem_euclid(4), 0 | 1) {
            return Err(Error::InvalidDiscriminant(value));
        }
        Ok(Discriminant(value))
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn is_valid(value: i64) -> bool {
        value < 0 && matches!(value.rem_euclid(4), 0 | 1)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reduced primitive form `a x^2 + b xy + c y^2`.
///
/// `|b| <= a <= c`, with `b >= 0` when `|b| = a` or `a = c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedForm {
    fn new(a: i64, b: i64, c: i64) -> Self {
        let form = ReducedForm { a, b, c };
        debug_assert!(form.is_reduced() && form.is_primitive() && form.discriminant() < 0);
        form
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let ReducedForm { a, b, c } = *self;
        a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }
}

/// Class number together with its weighted variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassNumberEntry {
    pub disc: Discriminant,
    pub h: u64,
    pub h_w: Rat,
}

// Walks the reduced primitive forms of `disc` in (a, b, c) order.
fn for_each_reduced(disc: i64, mut visit: impl FnMut(i64, i64, i64)) {
    let abs = (-disc) as u64;
    let a_max = isqrt(abs / 3) as i64;
    for a in 1..=a_max {
        for b in (-a + 1)..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                visit(a, b, c);
            }
        }
    }
}

/// All reduced primitive forms of the discriminant, sorted by `(a, b, c)`.
pub fn reduced_forms(disc: Discriminant) -> Vec<ReducedForm> {
    let mut out = Vec::new();
    for_each_reduced(disc.0, |a, b, c| out.push(ReducedForm::new(a, b, c)));
    out
}

fn class_cache() -> &'static RwLock<HashMap<i64, u64>> {
    static CACHE: OnceLock<RwLock<HashMap<i64, u64>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Number of SL_2(Z)-classes of primitive forms, memoized per discriminant.
pub fn class_number(disc: Discriminant) -> u64 {
    if let Some(&h) = class_cache().read().unwrap().get(&disc.0) {
        return h;
    }
    let mut h = 0;
    for_each_reduced(disc.0, |_, _, _| h += 1);
    class_cache().write().unwrap().insert(disc.0, h);
    h
}

/// `h(D)` except at the two discriminants with extra automorphisms:
/// `h_w(-3) = 1/3` and `h_w(-4) = 1/2`.
pub fn class_number_weighted(disc: Discriminant) -> Rat {
    match disc.0 {
        -3 => rat(1, 3),
        -4 => rat(1, 2),
        _ => rat_int(class_number(disc)),
    }
}

pub fn class_number_entry(disc: Discriminant) -> ClassNumberEntry {
    ClassNumberEntry {
        disc,
        h: class_number(disc),
        h_w: class_number_weighted(disc),
    }
}

/// Checked constructor used by callers that hold raw values.
pub fn class_number_weighted_raw(value: i64) -> Result<Rat> {
    Ok(class_number_weighted(Discriminant::new(value)?))
}

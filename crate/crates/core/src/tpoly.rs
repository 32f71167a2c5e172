//! Exact polynomials in `t` and symmetric-polynomial accumulators in `x_1..x_n`.
//!
//! [`TPoly`] stores dense arbitrary-precision coefficients, always trimmed so
//! the leading coefficient is nonzero. [`SymPoly`] maps exponent vectors to
//! nonzero [`TPoly`] coefficients. [`TermAccumulator`] is the hot-path
//! collector used by the enumeration engines: it counts monomials of the
//! shape `t^e (1-t)^d x^v` and expands them into a [`SymPoly`] at the end.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{HlError, Result};

/// Univariate polynomial in `t` with integer coefficients; `coeffs[i]` is the
/// coefficient of `t^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct TPoly {
    coeffs: Vec<BigInt>,
}

impl TPoly {
    pub fn zero() -> Self {
        TPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    /// `c * t^e`.
    pub fn monomial(c: impl Into<BigInt>, e: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); e + 1];
        coeffs[e] = c.into();
        Self::from_coeffs(coeffs)
    }

    pub fn t() -> Self {
        Self::monomial(1, 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        TPoly { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::from_coeffs(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `(1 - t)^d`, expanded with binomial coefficients.
    pub fn one_minus_t_pow(d: usize) -> Self {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut binom = BigInt::one();
        for k in 0..=d {
            let c = if k % 2 == 0 { binom.clone() } else { -binom.clone() };
            coeffs.push(c);
            binom = binom * BigInt::from(d - k) / BigInt::from(k + 1);
        }
        Self::from_coeffs(coeffs)
    }

    /// `t^e (1 - t)^d`.
    pub fn t_one_minus_t(e: usize, d: usize) -> Self {
        Self::one_minus_t_pow(d).shift(e)
    }

    /// `[k]_t = 1 + t + ... + t^{k-1}`; `[0]_t = 0`.
    pub fn quantum_integer(k: usize) -> Self {
        Self::from_coeffs(vec![BigInt::one(); k])
    }

    /// Multiply by `t^e`.
    pub fn shift(&self, e: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); e];
        coeffs.extend(self.coeffs.iter().cloned());
        TPoly { coeffs }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn eval_at_zero(&self) -> BigInt {
        self.coeff(0)
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Exact division. Returns `None` when `divisor` does not divide `self`
    /// over the integers (or `divisor` is zero).
    pub fn div_exact(&self, divisor: &TPoly) -> Option<TPoly> {
        let dl = divisor.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let lead = &divisor.coeffs[dl];
        let mut rem = self.coeffs.clone();
        let ql = rem.len().checked_sub(dl + 1)? + 1;
        let mut quot = vec![BigInt::zero(); ql];
        for i in (0..ql).rev() {
            let top = &rem[i + dl];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (k, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + k] -= &q * dc;
            }
            quot[i] = q;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(Self::from_coeffs(quot))
        } else {
            None
        }
    }
}

/// `[m]_t! = [m]_t [m-1]_t ... [1]_t`, with `[0]_t! = 1`.
pub fn t_quantum_factorial(m: usize) -> TPoly {
    (1..=m).fold(TPoly::one(), |acc, k| &acc * &TPoly::quantum_integer(k))
}

impl Add<&TPoly> for &TPoly {
    type Output = TPoly;
    fn add(self, rhs: &TPoly) -> TPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        TPoly::from_coeffs(coeffs)
    }
}

impl Sub<&TPoly> for &TPoly {
    type Output = TPoly;
    fn sub(self, rhs: &TPoly) -> TPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        TPoly::from_coeffs(coeffs)
    }
}

impl Mul<&TPoly> for &TPoly {
    type Output = TPoly;
    fn mul(self, rhs: &TPoly) -> TPoly {
        if self.is_zero() || rhs.is_zero() {
            return TPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        TPoly::from_coeffs(coeffs)
    }
}

impl Neg for &TPoly {
    type Output = TPoly;
    fn neg(self) -> TPoly {
        TPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<TPoly> for TPoly {
            type Output = TPoly;
            fn $m(self, rhs: TPoly) -> TPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&TPoly> for TPoly {
    fn add_assign(&mut self, rhs: &TPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigInt::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

/// Renders as `c0 + c1*t + c2*t^2`, skipping zero terms and unit factors.
impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// JSON number when the coefficient fits in `i64`, decimal string otherwise.
fn coeff_to_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(c.to_string()),
    }
}

fn coeff_from_json(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => {
            n.as_i64().map(BigInt::from).ok_or_else(|| HlError::Parse(format!("non-integer coefficient {n}")))
        }
        serde_json::Value::String(s) => {
            s.parse::<BigInt>().map_err(|e| HlError::Parse(format!("bad coefficient {s:?}: {e}")))
        }
        other => Err(HlError::Parse(format!("bad coefficient {other}"))),
    }
}

impl TPoly {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.coeffs.iter().map(coeff_to_json).collect())
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| HlError::Parse("coefficients must be an array".into()))?;
        Ok(Self::from_coeffs(arr.iter().map(coeff_from_json).collect::<Result<_>>()?))
    }
}

/// Powers of `x_1..x_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn zeros(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        ExponentVector(v)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Polynomial in `x_1..x_n` with [`TPoly`] coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPoly {
    n: usize,
    terms: BTreeMap<ExponentVector, TPoly>,
}

impl SymPoly {
    pub fn new(n: usize) -> Self {
        SymPoly { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        let mut p = Self::new(n);
        p.terms.insert(ExponentVector::zeros(n), TPoly::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    fn check(&self, exps: &ExponentVector) -> Result<()> {
        if exps.len() != self.n {
            return Err(HlError::Dimension { expected: self.n, got: exps.len() });
        }
        Ok(())
    }

    /// Adds `coeff * x^exps`; zero coefficients leave the map unchanged.
    pub fn accumulate(&mut self, exps: ExponentVector, coeff: &TPoly) -> Result<()> {
        self.check(&exps)?;
        if coeff.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    /// Stored coefficient of `x^exps` (zero if absent).
    pub fn coefficient(&self, exps: &ExponentVector) -> Result<TPoly> {
        self.check(exps)?;
        Ok(self.terms.get(exps).cloned().unwrap_or_default())
    }

    pub fn merge(&mut self, other: &SymPoly) -> Result<()> {
        if other.n != self.n {
            return Err(HlError::Dimension { expected: self.n, got: other.n });
        }
        for (e, c) in &other.terms {
            self.accumulate(e.clone(), c)?;
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &TPoly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn map_coeffs(&self, f: impl Fn(&TPoly) -> TPoly) -> SymPoly {
        let mut out = SymPoly::new(self.n);
        for (e, c) in &self.terms {
            let c = f(c);
            if !c.is_zero() {
                out.terms.insert(e.clone(), c);
            }
        }
        out
    }

    /// Specialize `t = 0`.
    pub fn at_t_zero(&self) -> SymPoly {
        self.map_coeffs(|c| TPoly::from_coeffs(vec![c.eval_at_zero()]))
    }

    /// Specialize `t = 1`.
    pub fn at_t_one(&self) -> SymPoly {
        self.map_coeffs(|c| TPoly::from_coeffs(vec![c.eval_at_one()]))
    }

    /// Divides every coefficient exactly by `divisor`.
    pub fn div_exact(&self, divisor: &TPoly) -> Result<SymPoly> {
        let mut out = SymPoly::new(self.n);
        for (e, c) in &self.terms {
            let q = c.div_exact(divisor).ok_or_else(|| {
                HlError::Inconsistent(format!("coefficient {c} of {e} is not divisible by {divisor}"))
            })?;
            out.terms.insert(e.clone(), q);
        }
        Ok(out)
    }

    /// Swaps variables `x_i` and `x_{i+1}` (0-based `i`) in every monomial.
    pub fn swap_variables(&self, i: usize) -> SymPoly {
        let mut out = SymPoly::new(self.n);
        for (e, c) in &self.terms {
            let mut v = e.0.clone();
            v.swap(i, i + 1);
            out.terms.insert(ExponentVector(v), c.clone());
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n.saturating_sub(1)).all(|i| self.swap_variables(i) == *self)
    }

    pub fn is_homogeneous(&self, degree: u64) -> bool {
        self.terms.keys().all(|e| e.degree() == degree)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> =
            self.terms.iter().map(|(e, c)| serde_json::json!({ "exps": e.0, "coeffs": c.to_json() })).collect();
        serde_json::json!({ "terms": terms })
    }

    pub fn from_json(n: usize, v: &serde_json::Value) -> Result<SymPoly> {
        let terms = v
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or_else(|| HlError::Parse("missing \"terms\" array".into()))?;
        let mut out = SymPoly::new(n);
        for t in terms {
            let exps: Vec<u32> = serde_json::from_value(t.get("exps").cloned().unwrap_or_default())
                .map_err(|e| HlError::Parse(e.to_string()))?;
            let c = TPoly::from_json(t.get("coeffs").unwrap_or(&serde_json::Value::Null))?;
            out.accumulate(ExponentVector(exps), &c)?;
        }
        Ok(out)
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let constant_monomial = e.0.iter().all(|&x| x == 0);
            let single_const = c.degree() == Some(0);
            if single_const && c.coeff(0).is_one() && !constant_monomial {
                write!(f, "{e}")?;
            } else if constant_monomial {
                if single_const {
                    write!(f, "{c}")?;
                } else {
                    write!(f, "({c})")?;
                }
            } else if single_const {
                write!(f, "{c}*{e}")?;
            } else {
                write!(f, "({c})*{e}")?;
            }
        }
        Ok(())
    }
}

/// Counts of summands `t^e (1-t)^d x^v`, keyed by `(v, e, d)`.
///
/// Merging is associative and commutative, so parallel workers keep their
/// own accumulator and fold them together afterwards.
#[derive(Clone, Debug, Default)]
pub struct TermAccumulator {
    counts: HashMap<(ExponentVector, u32, u32), u64>,
    total: u64,
}

impl TermAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, exps: ExponentVector, t_exp: u32, one_minus_t_exp: u32) {
        *self.counts.entry((exps, t_exp, one_minus_t_exp)).or_insert(0) += 1;
        self.total += 1;
    }

    /// Number of summands pushed, before any collection.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn merge(mut self, other: TermAccumulator) -> TermAccumulator {
        let (mut big, small) = if self.counts.len() >= other.counts.len() {
            (std::mem::take(&mut self), other)
        } else {
            (other, std::mem::take(&mut self))
        };
        for (k, v) in small.counts {
            *big.counts.entry(k).or_insert(0) += v;
        }
        big.total += small.total;
        big
    }

    pub fn into_sympoly(self, n: usize) -> Result<SymPoly> {
        let mut cache: HashMap<(u32, u32), TPoly> = HashMap::new();
        let mut out = SymPoly::new(n);
        let mut keys: Vec<_> = self.counts.into_iter().collect();
        keys.sort();
        for ((exps, e, d), count) in keys {
            let base = cache.entry((e, d)).or_insert_with(|| TPoly::t_one_minus_t(e as usize, d as usize));
            out.accumulate(exps, &base.scale(&BigInt::from(count)))?;
        }
        Ok(out)
    }
}

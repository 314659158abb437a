use serde::{Serialize, Serializer};

use super::oracle::PatternOracle;
use super::partition::{falling_factorial, set_partitions};
use crate::cumulants::{
    cumulants_via_series, free_cumulants, law_from_cumulants, FreeCumulants, TwoStateCumulants,
};
use crate::error::{Error, Result};
use crate::freeprod::{duplicate_pair, CFreeFamily, State, WordSum};
use crate::laws::{MomentSequence, TwoStateLaw};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

/// Laws of `X_1, X_2, ...`; the list repeats periodically when more
/// summands are requested than laws are given.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec<T> {
    laws: Vec<TwoStateLaw<T>>,
}

impl<T: Scalar> SequenceSpec<T> {
    pub fn new(laws: Vec<TwoStateLaw<T>>) -> Result<Self> {
        let first = laws
            .first()
            .ok_or_else(|| Error::InvalidParameter("a sequence needs at least one law".into()))?;
        if first.order() < 2 {
            return Err(Error::OrderExceeded {
                requested: 2,
                supported: first.order(),
            });
        }
        for (j, l) in laws.iter().enumerate() {
            if l.order() != first.order() {
                return Err(Error::OrderMismatch {
                    left: first.order(),
                    right: l.order(),
                });
            }
            if !l.is_centered() {
                return Err(Error::Precondition(format!(
                    "law {j} is not centered in both states"
                )));
            }
            if !(*l.phi().get(2) > T::zero()) || !(*l.psi().get(2) > T::zero()) {
                return Err(Error::Precondition(format!(
                    "law {j} needs positive variances in both states"
                )));
            }
        }
        Ok(Self { laws })
    }

    pub fn identical(law: &TwoStateLaw<T>) -> Result<Self> {
        Self::new(vec![law.clone()])
    }

    pub fn laws(&self) -> &[TwoStateLaw<T>] {
        &self.laws
    }

    pub fn order(&self) -> usize {
        self.laws[0].order()
    }

    /// Law of `X_{j+1}`.
    pub fn law(&self, j: usize) -> &TwoStateLaw<T> {
        &self.laws[j % self.laws.len()]
    }

    /// `s_j² = ψ(X_j²)`.
    pub fn psi_variance(&self, j: usize) -> &T {
        self.law(j).psi().get(2)
    }

    /// `S_j² = φ(X_j²)`.
    pub fn phi_variance(&self, j: usize) -> &T {
        self.law(j).phi().get(2)
    }

    /// How many of the first `n` summands carry each listed law.
    fn multiplicities(&self, n: usize) -> Vec<usize> {
        let p = self.laws.len();
        (0..p).map(|i| n / p + usize::from(i < n % p)).collect()
    }

    fn weighted_sum(&self, n: usize, f: impl Fn(&TwoStateLaw<T>) -> T) -> T {
        self.laws
            .iter()
            .zip(self.multiplicities(n))
            .fold(T::zero(), |acc, (l, c)| acc + &(f(l) * &T::from_usize(c)))
    }

    /// `s_1² + ... + s_n²`.
    pub fn sum_psi_variance(&self, n: usize) -> T {
        self.weighted_sum(n, |l| l.psi().get(2).clone())
    }

    /// `S_1² + ... + S_n²`.
    pub fn sum_phi_variance(&self, n: usize) -> T {
        self.weighted_sum(n, |l| l.phi().get(2).clone())
    }
}

/// Law of `X_1 + ... + X_n` to the given order: both cumulant sequences add.
pub fn free_sum_moments<T: Scalar>(
    spec: &SequenceSpec<T>,
    n: usize,
    order: usize,
) -> Result<TwoStateLaw<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "a sum needs at least one summand".into(),
        ));
    }
    if order > spec.order() {
        return Err(Error::OrderExceeded {
            requested: order,
            supported: spec.order(),
        });
    }
    let mut big_r = TwoStateCumulants::zeros(order);
    let mut r = FreeCumulants::zeros(order);
    for (law, count) in spec.laws().iter().zip(spec.multiplicities(n)) {
        if count == 0 {
            continue;
        }
        let law = law.truncate(order);
        big_r = big_r.add(&cumulants_via_series(&law).times(count))?;
        r = r.add(&free_cumulants(law.psi()).times(count))?;
    }
    law_from_cumulants(&big_r, &r)
}

/// A moment that is exact unless it carries an irrational normalizer.
#[derive(Debug, Clone, PartialEq)]
pub enum Moment<T> {
    Exact(T),
    Float(f64),
}

impl<T: Scalar> Moment<T> {
    pub fn to_f64(&self) -> f64 {
        match self {
            Moment::Exact(v) => v.to_f64(),
            Moment::Float(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&T> {
        match self {
            Moment::Exact(v) => Some(v),
            Moment::Float(_) => None,
        }
    }

    /// `|self - other|` as a float, exact before conversion when both are.
    pub fn abs_diff(&self, other: &T) -> f64 {
        match self {
            Moment::Exact(v) => (v.clone() - other).abs_value().to_f64(),
            Moment::Float(v) => (v - other.to_f64()).abs(),
        }
    }
}

impl<T: Scalar> Serialize for Moment<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Moment::Exact(v) => s.serialize_str(&v.to_repr()),
            Moment::Float(v) => s.serialize_f64(*v),
        }
    }
}

/// `m_k / c^(k/2)` for `k = 0..=N` with `c` the squared normalizer; odd
/// `k` leave a factor `1/sqrt(c)` and become floats unless zero.
pub fn normalize_moments<T: Scalar>(
    m: &MomentSequence<T>,
    normalizer_sq: &T,
) -> Result<Vec<Moment<T>>> {
    if normalizer_sq.is_zero() {
        return Err(Error::InvalidParameter("zero normalizer".into()));
    }
    let mut scale = T::one();
    let mut out = Vec::with_capacity(m.order() + 1);
    for (k, v) in m.moments().iter().enumerate() {
        if k % 2 == 0 {
            if k > 0 {
                scale = scale * normalizer_sq;
            }
            out.push(Moment::Exact(v.clone() / &scale));
        } else if v.is_zero() {
            out.push(Moment::Exact(T::zero()));
        } else {
            out.push(Moment::Float(
                (v.clone() / &scale).to_f64() / normalizer_sq.to_f64().sqrt(),
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct NormalizedSum<T: Scalar> {
    pub n: usize,
    #[serde(skip)]
    pub normalizer_sq: T,
    pub phi: Vec<Moment<T>>,
    pub psi: Vec<Moment<T>>,
}

/// Moments of `(X_1 + ... + X_n) / sqrt(Σ S_j²)` (normalization by φ) or
/// `/ sqrt(Σ s_j²)` (by ψ), in both states.
pub fn normalized_sum_moments<T: Scalar>(
    spec: &SequenceSpec<T>,
    n: usize,
    normalization: State,
    order: usize,
) -> Result<NormalizedSum<T>> {
    let law = free_sum_moments(spec, n, order)?;
    let c = match normalization {
        State::Phi => spec.sum_phi_variance(n),
        State::Psi => spec.sum_psi_variance(n),
    };
    Ok(NormalizedSum {
        n,
        phi: normalize_moments(law.phi(), &c)?,
        psi: normalize_moments(law.psi(), &c)?,
        normalizer_sq: c,
    })
}

/// Moments of the law with `G(z) = 1 / (z - g(z))`, `g(z) = ∫ S / (Sz - s x) ν(dx)`,
/// i.e. `g` is the Cauchy transform of `ν` dilated by `s/S`.
pub fn clt_limit_law<T: Scalar>(
    nu: &MomentSequence<T>,
    s: &T,
    big_s: &T,
    order: usize,
) -> Result<MomentSequence<T>> {
    if !(*s > T::zero()) || !(*big_s > T::zero()) {
        return Err(Error::InvalidParameter("s and S must be positive".into()));
    }
    if order > nu.order() {
        return Err(Error::OrderExceeded {
            requested: order,
            supported: nu.order(),
        });
    }
    let t = s.clone() / big_s;
    let g = nu.truncate(order).dilate(&t).cauchy_series();
    let n = g.order();
    let den = &TruncatedSeries::one(n) - &g.mul_z_pow(1).truncate(n);
    MomentSequence::from_cauchy_series(&den.reciprocal()?.mul_z_pow(1).truncate(n))
}

/// `φ(S_n^m)` (or `ψ`) for `n` exchangeable summands: the sum over set
/// partitions `π` of `{1..m}` of `n (n-1) ... (n-|π|+1) · oracle(π)`.
pub fn pattern_sum_moment<T: Scalar>(
    oracle: &dyn PatternOracle<T>,
    n: usize,
    m: usize,
    state: State,
) -> Result<T> {
    if m > oracle.max_order() {
        return Err(Error::OrderExceeded {
            requested: m,
            supported: oracle.max_order(),
        });
    }
    let mut acc = T::zero();
    for p in set_partitions(m) {
        let mult: T = falling_factorial(n, p.num_blocks());
        if mult.is_zero() {
            continue;
        }
        acc += &(oracle.pattern_moment(&p, state)? * &mult);
    }
    Ok(acc)
}

/// Both moment sequences of `S_n` up to order `m` from a pattern oracle.
pub fn pattern_sum_moments<T: Scalar>(
    oracle: &dyn PatternOracle<T>,
    n: usize,
    m: usize,
) -> Result<TwoStateLaw<T>> {
    let seq = |state| -> Result<MomentSequence<T>> {
        MomentSequence::new(
            (0..=m)
                .map(|k| pattern_sum_moment(oracle, n, k, state))
                .collect::<Result<_>>()?,
        )
    };
    TwoStateLaw::new(seq(State::Phi)?, seq(State::Psi)?)
}

/// `φ(S_n^m)` by summing all `n^m` words in `n` free copies of `law`.
pub fn exhaustive_sum_moment<T: Scalar>(
    law: &TwoStateLaw<T>,
    n: usize,
    m: usize,
    state: State,
) -> Result<T> {
    let family = CFreeFamily::identical(law, n)?;
    let mut eval = family.evaluator();
    let mut acc = T::zero();
    let mut word = vec![0usize; m];
    loop {
        acc += &eval.moment(state, &word)?;
        // next word in base n
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(acc);
            }
            i -= 1;
            word[i] += 1;
            if word[i] < n {
                break;
            }
            word[i] = 0;
        }
    }
}

/// `|φ((U_n - V_n)² S_n^m) - 2 φ(S_n^m) Σ S_j² / n|` with `U_n`, `V_n` the
/// `1/sqrt(n)`-normalized sums of two free copies of the sequence and
/// `S_n = U_n + V_n`. Each block sum is treated as one variable with the law
/// of [`free_sum_moments`].
pub fn lemma6_residual_for<T: Scalar>(
    spec: &SequenceSpec<T>,
    n: usize,
    m: usize,
) -> Result<Moment<T>> {
    let aggregate = free_sum_moments(spec, n, m + 2)?;
    let family = duplicate_pair(&aggregate);
    let a = WordSum::letter(0);
    let b = WordSum::letter(1);
    let power = a.add(&b).pow(m);
    let mut eval = family.evaluator();
    let lhs = eval.wordsum_moment(&a.sub(&b).pow(2).mul(&power), State::Phi)?;
    let rhs =
        eval.wordsum_moment(&power, State::Phi)? * &T::from_i64(2) * &spec.sum_phi_variance(n);
    // the bracket carries the factor n^((m+2)/2)
    let bracket = (lhs - &rhs).abs_value();
    let half = (m + 2) / 2;
    let scale = T::from_usize(n).powi(half as u32);
    if m.is_multiple_of(2) || bracket.is_zero() {
        Ok(Moment::Exact(bracket / &scale))
    } else {
        Ok(Moment::Float(
            (bracket / &scale).to_f64() / (n as f64).sqrt(),
        ))
    }
}

pub fn lemma6_residual<T: Scalar>(law: &TwoStateLaw<T>, n: usize, m: usize) -> Result<Moment<T>> {
    lemma6_residual_for(&SequenceSpec::identical(law)?, n, m)
}

/// One line of a convergence experiment: the `k`-th normalized moment of
/// `S_n` against the limit law.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct ConvergenceRow<T: Scalar> {
    pub n: usize,
    pub k: usize,
    pub normalized: Moment<T>,
    #[serde(serialize_with = "serialize_repr")]
    pub limit: T,
    pub abs_error: f64,
}

fn serialize_repr<T: Scalar, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_repr())
}

/// Moments `1..=max_moment` of the normalized sums for each `n` in `n_list`
/// against the moments of `limit`. The `n` are processed on separate threads;
/// rows come back in input order.
pub fn convergence_table<T: Scalar>(
    spec: &SequenceSpec<T>,
    limit: &MomentSequence<T>,
    n_list: &[usize],
    max_moment: usize,
    normalization: State,
) -> Result<Vec<ConvergenceRow<T>>> {
    if max_moment > limit.order() {
        return Err(Error::OrderExceeded {
            requested: max_moment,
            supported: limit.order(),
        });
    }
    let sums: Vec<Result<NormalizedSum<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = n_list
            .iter()
            .map(|&n| {
                scope.spawn(move || normalized_sum_moments(spec, n, normalization, max_moment))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut rows = Vec::with_capacity(n_list.len() * max_moment);
    for sum in sums {
        let sum = sum?;
        for k in 1..=max_moment {
            let target = limit.get(k).clone();
            rows.push(ConvergenceRow {
                n: sum.n,
                k,
                abs_error: sum.phi[k].abs_diff(&target),
                normalized: sum.phi[k].clone(),
                limit: target,
            });
        }
    }
    Ok(rows)
}

/// Largest error per `n` over the rows of a [`convergence_table`].
pub fn max_error_by_n<T: Scalar>(rows: &[ConvergenceRow<T>]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some((n, e)) if *n == r.n => *e = e.max(r.abs_error),
            _ => out.push((r.n, r.abs_error)),
        }
    }
    out
}

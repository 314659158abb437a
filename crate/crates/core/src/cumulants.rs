//! Diagonal two-state cumulants `R_n = R_{n,φ,ψ}(a, ..., a)` and free
//! cumulants `r_n = R_{n,ψ,ψ}(a, ..., a)` of a single variable.
//!
//! The defining recursion expresses `φ(a^n)` as a sum over position sets
//! `{1 = s_1 < ... < s_k} ⊆ {1..n}`: one cumulant `R_k` on those positions,
//! `ψ` of every gap between consecutive positions, and `φ` of the tail after
//! `s_k`. Two independent solvers are provided: the recursion summed over
//! position sets ([`moments_to_cumulants`]) and the generating-function
//! identity `M(z)(1 - z R(z m(z))) = 1` ([`cumulants_via_series`]).

use crate::error::{Error, Result};
use crate::laws::{MomentSequence, TwoStateLaw};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

macro_rules! cumulant_sequence {
    ($name:ident) => {
        impl<T: Scalar> $name<T> {
            /// `values[n-1]` is the cumulant of order `n`.
            pub fn new(values: Vec<T>) -> Self {
                Self(values)
            }

            pub fn zeros(order: usize) -> Self {
                Self(vec![T::zero(); order])
            }

            pub fn order(&self) -> usize {
                self.0.len()
            }

            pub fn values(&self) -> &[T] {
                &self.0
            }

            /// Cumulant of order `n >= 1`; panics outside `1..=order`.
            pub fn get(&self, n: usize) -> &T {
                &self.0[n - 1]
            }

            /// `Σ_n c_n z^(n-1)`, of order `N - 1`.
            pub fn generating_series(&self) -> TruncatedSeries<T> {
                assert!(!self.0.is_empty(), "empty cumulant sequence has no series");
                TruncatedSeries::new(self.0.clone())
            }

            /// Cumulants add under the corresponding convolution.
            pub fn add(&self, other: &Self) -> Result<Self> {
                if self.order() != other.order() {
                    return Err(Error::OrderMismatch {
                        left: self.order(),
                        right: other.order(),
                    });
                }
                Ok(Self(
                    self.0
                        .iter()
                        .zip(&other.0)
                        .map(|(a, b)| a.clone() + b)
                        .collect(),
                ))
            }

            /// Cumulants of the dilation `a -> c a`: `c_n -> c^n c_n`.
            pub fn dilate(&self, c: &T) -> Self {
                let mut p = T::one();
                Self(
                    self.0
                        .iter()
                        .map(|v| {
                            p = p.clone() * c;
                            v.clone() * &p
                        })
                        .collect(),
                )
            }

            /// Cumulants of a sum of `k` copies: `c_n -> k c_n`.
            pub fn times(&self, k: usize) -> Self {
                let f = T::from_usize(k);
                Self(self.0.iter().map(|v| v.clone() * &f).collect())
            }

            pub fn truncate(&self, order: usize) -> Self {
                Self(self.0[..order.min(self.order())].to_vec())
            }
        }
    };
}

/// `R_1..R_N` of a variable with respect to `(φ, ψ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStateCumulants<T>(Vec<T>);

/// `r_1..r_N` of a variable with respect to `ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeCumulants<T>(Vec<T>);

cumulant_sequence!(TwoStateCumulants);
cumulant_sequence!(FreeCumulants);

impl<T: Scalar> From<FreeCumulants<T>> for TwoStateCumulants<T> {
    fn from(r: FreeCumulants<T>) -> Self {
        TwoStateCumulants(r.0)
    }
}

/// Sum over position sets for `φ(a^n)`.
///
/// The sets `{1 = s_1 < ... < s_k}` are grouped by their last element and
/// size: `tails[last][k]` sums, over all ways to continue a set whose `k`-th
/// element is `last`, the gap moments still to come times `R_(final size)`
/// times the tail moment. With `skip_full` the set `{1..n}` (the term `R_n`)
/// is left out.
fn position_set_sum<T: Scalar>(
    n: usize,
    cumulants: &[T],
    phi: &[T],
    psi: &[T],
    skip_full: bool,
) -> T {
    let mut tails: Vec<Vec<T>> = vec![Vec::new(); n + 1];
    for last in (1..=n).rev() {
        let row: Vec<T> = (0..=last)
            .map(|k| {
                if k == 0 {
                    return T::zero();
                }
                let mut acc = if skip_full && k == n {
                    T::zero()
                } else {
                    cumulants[k - 1].clone() * &phi[n - last]
                };
                for next in last + 1..=n {
                    let g = &psi[next - last - 1];
                    if !g.is_zero() {
                        acc += &(tails[next][k + 1].clone() * g);
                    }
                }
                acc
            })
            .collect();
        tails[last] = row;
    }
    tails[1][1].clone()
}

/// Two-state cumulants by solving the position-set recursion for `R_n`,
/// one order at a time.
pub fn moments_to_cumulants<T: Scalar>(law: &TwoStateLaw<T>) -> TwoStateCumulants<T> {
    let order = law.order();
    let phi = law.phi().moments();
    let psi = law.psi().moments();
    let mut r: Vec<T> = Vec::with_capacity(order);
    for n in 1..=order {
        // R_n is the only unknown and enters with coefficient 1.
        r.push(T::zero());
        let rest = position_set_sum(n, &r, phi, psi, true);
        r[n - 1] = phi[n].clone() - &rest;
    }
    TwoStateCumulants(r)
}

/// Forward direction of the enumeration: `φ`-moments from `R` and `ψ`.
pub fn cumulants_to_moments_enumerated<T: Scalar>(
    cumulants: &TwoStateCumulants<T>,
    psi: &MomentSequence<T>,
) -> Result<MomentSequence<T>> {
    let order = cumulants.order();
    if order != psi.order() {
        return Err(Error::OrderMismatch {
            left: order,
            right: psi.order(),
        });
    }
    let mut phi = vec![T::one()];
    for n in 1..=order {
        let v = position_set_sum(
            n,
            cumulants.values(),
            &phi_padded(&phi, n),
            psi.moments(),
            false,
        );
        phi.push(v);
    }
    MomentSequence::new(phi)
}

// The sum for φ(a^n) only reads φ of strictly shorter tails; pad the slot for
// index n so indexing stays uniform.
fn phi_padded<T: Scalar>(phi: &[T], n: usize) -> Vec<T> {
    let mut p = phi.to_vec();
    p.resize(n + 1, T::zero());
    p
}

/// Two-state cumulants from `M(z) - 1 = z M(z) R(z m(z))`, solved order by
/// order: `R_n = φ_n - Σ_{k<n} R_k [z^(n-1)] M(z) (z m(z))^(k-1)`.
pub fn cumulants_via_series<T: Scalar>(law: &TwoStateLaw<T>) -> TwoStateCumulants<T> {
    let order = law.order();
    if order == 0 {
        return TwoStateCumulants(Vec::new());
    }
    let top = order - 1;
    let big_m = law.phi().generating_series().truncate(top);
    let zm = law.psi().generating_series().mul_z_pow(1).truncate(top);
    // products[j] = M (z m)^j to order N-1
    let mut products = Vec::with_capacity(order);
    products.push(big_m);
    for j in 1..order {
        let next = products[j - 1].mul_series(&zm);
        products.push(next);
    }
    let phi = law.phi().moments();
    let mut r: Vec<T> = Vec::with_capacity(order);
    for (n, m) in phi.iter().enumerate().take(order + 1).skip(1) {
        let mut v = m.clone();
        for k in 1..n {
            let c = &products[k - 1].coeffs()[n - 1];
            if c.is_zero() || r[k - 1].is_zero() {
                continue;
            }
            v -= &(r[k - 1].clone() * c);
        }
        r.push(v);
    }
    TwoStateCumulants(r)
}

/// `φ`-moments from `R` and the `ψ`-law: `M(z) = 1 / (1 - z R(z m(z)))`.
pub fn cumulants_to_moments<T: Scalar>(
    cumulants: &TwoStateCumulants<T>,
    psi: &MomentSequence<T>,
) -> Result<MomentSequence<T>> {
    let order = cumulants.order();
    if order != psi.order() {
        return Err(Error::OrderMismatch {
            left: order,
            right: psi.order(),
        });
    }
    if order == 0 {
        return MomentSequence::new(vec![T::one()]);
    }
    let zm = psi.generating_series().mul_z_pow(1).truncate(order - 1);
    let inner = cumulants.generating_series().compose(&zm)?;
    let denominator = &TruncatedSeries::one(order) - &inner.mul_z_pow(1);
    MomentSequence::from_generating_series(&denominator.reciprocal()?)
}

/// Free cumulants: the two-state cumulants with both states equal to `ψ`.
pub fn free_cumulants<T: Scalar>(psi: &MomentSequence<T>) -> FreeCumulants<T> {
    let law = TwoStateLaw::single_state(psi.clone());
    FreeCumulants(cumulants_via_series(&law).0)
}

/// Moments from free cumulants, the fixed point of
/// `m(z) = 1 / (1 - z r(z m(z)))`; each pass fixes one more coefficient.
pub fn free_cumulants_to_moments<T: Scalar>(r: &FreeCumulants<T>) -> Result<MomentSequence<T>> {
    let order = r.order();
    if order == 0 {
        return MomentSequence::new(vec![T::one()]);
    }
    let rz = r.generating_series();
    let mut m = TruncatedSeries::one(order);
    for _ in 0..order {
        let zm = m.mul_z_pow(1).truncate(order - 1);
        let den = &TruncatedSeries::one(order) - &rz.compose(&zm)?.mul_z_pow(1);
        m = den.reciprocal()?;
    }
    MomentSequence::from_generating_series(&m)
}

/// Both cumulant sequences of a law, via the series route.
pub fn cumulants_of<T: Scalar>(law: &TwoStateLaw<T>) -> (TwoStateCumulants<T>, FreeCumulants<T>) {
    (cumulants_via_series(law), free_cumulants(law.psi()))
}

/// The two-state law with the given cumulant sequences.
pub fn law_from_cumulants<T: Scalar>(
    big_r: &TwoStateCumulants<T>,
    r: &FreeCumulants<T>,
) -> Result<TwoStateLaw<T>> {
    let psi = free_cumulants_to_moments(r)?;
    let phi = cumulants_to_moments(big_r, &psi)?;
    TwoStateLaw::new(phi, psi)
}

//! Joint moments of words in variables that are ψ-free and (φ|ψ)-free.
//!
//! Each variable generates its own algebra and is described by its two-state
//! law. Mixed cumulants vanish, so in the defining recursion only position
//! sets whose letters all equal the first letter contribute.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cumulants::{
    cumulants_via_series, free_cumulants, moments_to_cumulants, FreeCumulants, TwoStateCumulants,
};
use crate::error::{Error, Result};
use crate::laws::TwoStateLaw;
use crate::scalar::Scalar;

/// Longest word the engine accepts.
pub const MAX_WORD_LEN: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum State {
    Phi,
    Psi,
}

impl State {
    pub fn as_str(&self) -> &'static str {
        match self {
            State::Phi => "phi",
            State::Psi => "psi",
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A product `X_{i_1} ... X_{i_n}` of family variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// `X_i^n`.
    pub fn power(letter: usize, n: usize) -> Self {
        Self(vec![letter; n])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("X{i}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// A noncommutative polynomial `Σ c_w w` in the family variables.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSum<T> {
    terms: BTreeMap<Word, T>,
}

impl<T: Scalar> WordSum<T> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::scalar(T::one())
    }

    pub fn scalar(c: T) -> Self {
        Self::term(c, Word::empty())
    }

    pub fn letter(i: usize) -> Self {
        Self::term(T::one(), Word::new(vec![i]))
    }

    pub fn term(c: T, w: Word) -> Self {
        let mut s = Self::zero();
        s.push(c, w);
        s
    }

    fn push(&mut self, c: T, w: Word) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w.clone()).or_insert_with(T::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Length of the longest word.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (w, c) in &other.terms {
            s.push(c.clone(), w.clone());
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut s = Self::zero();
        for (w, v) in &self.terms {
            s.push(v.clone() * c, w.clone());
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut s = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                s.push(c1.clone() * c2, w1.concat(w2));
            }
        }
        s
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }
}

/// Variables `X_0, ..., X_{L-1}`, each with its own two-state law, jointly
/// ψ-free and (φ|ψ)-free.
#[derive(Debug, Clone, PartialEq)]
pub struct CFreeFamily<T> {
    laws: Vec<TwoStateLaw<T>>,
    big_r: Vec<TwoStateCumulants<T>>,
    r: Vec<FreeCumulants<T>>,
    order: usize,
}

impl<T: Scalar> CFreeFamily<T> {
    pub fn new(laws: Vec<TwoStateLaw<T>>) -> Result<Self> {
        let order = match laws.first() {
            Some(l) => l.order(),
            None => {
                return Err(Error::InvalidParameter(
                    "a family needs at least one variable".into(),
                ))
            }
        };
        if let Some(l) = laws.iter().find(|l| l.order() != order) {
            return Err(Error::OrderMismatch {
                left: order,
                right: l.order(),
            });
        }
        let big_r = laws.iter().map(cumulants_via_series).collect();
        let r = laws.iter().map(|l| free_cumulants(l.psi())).collect();
        Ok(Self {
            laws,
            big_r,
            r,
            order,
        })
    }

    /// `count` variables sharing one law.
    pub fn identical(law: &TwoStateLaw<T>, count: usize) -> Result<Self> {
        Self::new(vec![law.clone(); count])
    }

    pub fn len(&self) -> usize {
        self.laws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.laws.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn law(&self, i: usize) -> &TwoStateLaw<T> {
        &self.laws[i]
    }

    pub fn laws(&self) -> &[TwoStateLaw<T>] {
        &self.laws
    }

    pub fn two_state_cumulants(&self, i: usize) -> &TwoStateCumulants<T> {
        &self.big_r[i]
    }

    pub fn free_cumulants(&self, i: usize) -> &FreeCumulants<T> {
        &self.r[i]
    }

    /// Recomputes every cached cumulant by the enumeration route.
    pub fn cache_is_consistent(&self) -> bool {
        self.laws.iter().enumerate().all(|(i, l)| {
            moments_to_cumulants(l) == self.big_r[i]
                && moments_to_cumulants(&TwoStateLaw::single_state(l.psi().clone())).values()
                    == self.r[i].values()
        })
    }

    /// Longest word this family can evaluate.
    pub fn max_word_len(&self) -> usize {
        self.order.min(MAX_WORD_LEN)
    }

    pub fn validate(&self, letters: &[usize]) -> Result<()> {
        if letters.len() > self.max_word_len() {
            return Err(Error::OrderExceeded {
                requested: letters.len(),
                supported: self.max_word_len(),
            });
        }
        if let Some(&i) = letters.iter().find(|&&i| i >= self.len()) {
            return Err(Error::InvalidParameter(format!(
                "letter X{i} outside a family of {} variables",
                self.len()
            )));
        }
        Ok(())
    }

    pub fn evaluator(&self) -> WordEvaluator<'_, T> {
        WordEvaluator::new(self)
    }

    pub fn phi_word_moment(&self, w: &Word) -> Result<T> {
        self.evaluator().moment(State::Phi, w.letters())
    }

    pub fn psi_word_moment(&self, w: &Word) -> Result<T> {
        self.evaluator().moment(State::Psi, w.letters())
    }

    pub fn wordsum_moment(&self, ws: &WordSum<T>, state: State) -> Result<T> {
        self.evaluator().wordsum_moment(ws, state)
    }
}

/// Two variables sharing `law`.
pub fn duplicate_pair<T: Scalar>(law: &TwoStateLaw<T>) -> CFreeFamily<T> {
    CFreeFamily::identical(law, 2).expect("a single law always forms a family")
}

/// Evaluates words against a family, memoizing on subword content.
#[derive(Debug)]
pub struct WordEvaluator<'a, T> {
    family: &'a CFreeFamily<T>,
    memo: Option<HashMap<(State, Vec<usize>), T>>,
}

impl<'a, T: Scalar> WordEvaluator<'a, T> {
    pub fn new(family: &'a CFreeFamily<T>) -> Self {
        Self {
            family,
            memo: Some(HashMap::new()),
        }
    }

    /// An evaluator that recomputes every subword.
    pub fn without_memo(family: &'a CFreeFamily<T>) -> Self {
        Self { family, memo: None }
    }

    pub fn family(&self) -> &'a CFreeFamily<T> {
        self.family
    }

    pub fn moment(&mut self, state: State, letters: &[usize]) -> Result<T> {
        self.family.validate(letters)?;
        Ok(self.eval(state, letters))
    }

    pub fn wordsum_moment(&mut self, ws: &WordSum<T>, state: State) -> Result<T> {
        let mut acc = T::zero();
        for (w, c) in ws.terms() {
            acc += &(self.moment(state, w.letters())? * c);
        }
        Ok(acc)
    }

    fn eval(&mut self, state: State, w: &[usize]) -> T {
        if w.is_empty() {
            return T::one();
        }
        if let Some(memo) = &self.memo {
            if let Some(v) = memo.get(&(state, w.to_vec())) {
                return v.clone();
            }
        }
        let v = self.expand(state, w);
        if let Some(memo) = &mut self.memo {
            memo.insert((state, w.to_vec()), v.clone());
        }
        v
    }

    fn expand(&mut self, state: State, w: &[usize]) -> T {
        let letter = w[0];
        let positions: Vec<usize> = (0..w.len()).filter(|&i| w[i] == letter).collect();
        let family = self.family;
        let cumulants = match state {
            State::Phi => family.big_r[letter].values(),
            State::Psi => family.r[letter].values(),
        };
        let mut acc = T::zero();
        self.visit(state, w, &positions, 0, 1, T::one(), cumulants, &mut acc);
        acc
    }

    // `last` indexes into `positions`; `k` positions chosen so far.
    #[allow(clippy::too_many_arguments)]
    fn visit(
        &mut self,
        state: State,
        w: &[usize],
        positions: &[usize],
        last: usize,
        k: usize,
        gaps: T,
        cumulants: &[T],
        acc: &mut T,
    ) {
        let c = &cumulants[k - 1];
        if !c.is_zero() {
            let tail = self.eval(state, &w[positions[last] + 1..]);
            if !tail.is_zero() {
                *acc += &(gaps.clone() * c * &tail);
            }
        }
        for next in last + 1..positions.len() {
            let g = self.eval(State::Psi, &w[positions[last] + 1..positions[next]]);
            if g.is_zero() {
                continue;
            }
            let gaps = gaps.clone() * &g;
            self.visit(state, w, positions, next, k + 1, gaps, cumulants, acc);
        }
    }
}

use std::collections::HashMap;

use serde::Serialize;

use super::oracle::{Alphabet, MomentSource};
use super::partition::set_partitions;
use crate::error::{Error, Result};
use crate::freeprod::State;
use crate::scalar::{Scalar, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionId {
    Singleton1,
    Singleton2,
    Kargin2,
}

impl ConditionId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionId::Singleton1 => "singleton1",
            ConditionId::Singleton2 => "singleton2",
            ConditionId::Kargin2 => "kargin2",
        }
    }
}

/// Whether the conditions are checked on moments or on mixed cumulants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckForm {
    Moment,
    Cumulant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub condition: ConditionId,
    /// Letters of the witness word; `distinguished` is the letter `k`.
    pub word: Vec<usize>,
    pub distinguished: usize,
    pub display: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionAReport {
    pub form: CheckForm,
    pub max_order: usize,
    pub passed: bool,
    pub checks: usize,
    /// First witness found for each failing condition.
    pub violations: Vec<Violation>,
}

impl ConditionAReport {
    pub fn fails(&self, id: ConditionId) -> bool {
        self.violations.iter().any(|v| v.condition == id)
    }

    pub fn witness(&self, id: ConditionId) -> Option<&Violation> {
        self.violations.iter().find(|v| v.condition == id)
    }
}

const NAMES: [&str; 8] = ["j", "l", "m", "p", "q", "r", "t", "u"];

fn display(word: &[usize], k: usize, alphabet: Alphabet) -> String {
    let mut order: Vec<usize> = Vec::new();
    word.iter()
        .map(|&x| match alphabet {
            Alphabet::Finite(_) => format!("X{x}"),
            Alphabet::Exchangeable if x == k => "X_k".to_string(),
            Alphabet::Exchangeable => {
                let i = order.iter().position(|&y| y == x).unwrap_or_else(|| {
                    order.push(x);
                    order.len() - 1
                });
                format!("X_{}", NAMES.get(i).copied().unwrap_or("?"))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Every `(k, W)` with `k` absent from `W` and `|W| <= max_len`.
fn cases(alphabet: Alphabet, max_len: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    match alphabet {
        Alphabet::Exchangeable => {
            for r in 0..=max_len {
                for p in set_partitions(r) {
                    out.push((r, p.labels().to_vec()));
                }
            }
        }
        Alphabet::Finite(l) => {
            for k in 0..l {
                let others: Vec<usize> = (0..l).filter(|&i| i != k).collect();
                for r in 0..=max_len {
                    if others.is_empty() && r > 0 {
                        break;
                    }
                    let count = others.len().pow(r as u32);
                    for mut idx in 0..count {
                        let mut w = Vec::with_capacity(r);
                        for _ in 0..r {
                            w.push(others[idx % others.len()]);
                            idx /= others.len();
                        }
                        w.reverse();
                        out.push((k, w));
                    }
                }
            }
        }
    }
    out
}

struct Recorder<'r> {
    alphabet: Alphabet,
    violations: &'r mut Vec<Violation>,
    checks: usize,
}

impl Recorder<'_> {
    fn check<T: Scalar>(
        &mut self,
        id: ConditionId,
        word: Vec<usize>,
        k: usize,
        expected: T,
        actual: T,
    ) {
        self.checks += 1;
        if actual.approx_eq(&expected, DEFAULT_TOLERANCE)
            || self.violations.iter().any(|v| v.condition == id)
        {
            return;
        }
        self.violations.push(Violation {
            condition: id,
            display: display(&word, k, self.alphabet),
            word,
            distinguished: k,
            expected: expected.to_repr(),
            actual: actual.to_repr(),
        });
    }
}

fn insert(w: &[usize], pos: usize, k: usize) -> Vec<usize> {
    let mut v = w[..pos].to_vec();
    v.push(k);
    v.extend_from_slice(&w[pos..]);
    v
}

fn kargin_word(k: usize, w: &[usize], p: usize) -> Vec<usize> {
    let mut v = vec![k];
    v.extend_from_slice(&w[..p]);
    v.push(k);
    v.extend_from_slice(&w[p..]);
    v
}

fn check_order<T: Scalar, S: MomentSource<T> + ?Sized>(source: &S, m: usize) -> Result<()> {
    if m > source.max_order() {
        return Err(Error::OrderExceeded {
            requested: m,
            supported: source.max_order(),
        });
    }
    Ok(())
}

fn finish(
    form: CheckForm,
    m: usize,
    checks: usize,
    mut violations: Vec<Violation>,
) -> ConditionAReport {
    violations.sort_by_key(|v| v.condition);
    ConditionAReport {
        form,
        max_order: m,
        passed: violations.is_empty(),
        checks,
        violations,
    }
}

/// Checks the singleton conditions and the two-occurrence factorization on
/// all words of length at most `m` (up to relabelling, for exchangeable
/// sources).
pub fn check_condition_a<T: Scalar, S: MomentSource<T> + ?Sized>(
    source: &mut S,
    m: usize,
) -> Result<ConditionAReport> {
    check_order(source, m)?;
    let alphabet = source.alphabet();
    let mut violations = Vec::new();
    let mut rec = Recorder {
        alphabet,
        violations: &mut violations,
        checks: 0,
    };
    for (k, w) in cases(alphabet, m.saturating_sub(1)) {
        let r = w.len();
        for pos in 0..=r {
            let word = insert(&w, pos, k);
            let v = source.moment(State::Phi, &word)?;
            rec.check(ConditionId::Singleton1, word, k, T::zero(), v);
        }
        let word = insert(&w, 0, k);
        let v = source.moment(State::Psi, &word)?;
        rec.check(ConditionId::Singleton2, word, k, T::zero(), v);
        if r >= 1 && r + 2 <= m {
            let kk = source.moment(State::Phi, &[k, k])?;
            for p in 0..=r {
                let word = kargin_word(k, &w, p);
                let actual = source.moment(State::Phi, &word)?;
                let expected = kk.clone()
                    * &source.moment(State::Psi, &w[..p])?
                    * &source.moment(State::Phi, &w[p..])?;
                rec.check(ConditionId::Kargin2, word, k, expected, actual);
            }
        }
    }
    let checks = rec.checks;
    Ok(finish(CheckForm::Moment, m, checks, violations))
}

/// Mixed multilinear cumulants `R_n(a_1, ..., a_n)` (state φ) and
/// `r_n(a_1, ..., a_n)` (state ψ) of single letters, extracted from a
/// moment source by inverting the defining recursion.
pub struct MixedCumulants<'s, T, S: ?Sized> {
    source: &'s mut S,
    memo: HashMap<(State, Vec<usize>), T>,
}

impl<'s, T: Scalar, S: MomentSource<T> + ?Sized> MixedCumulants<'s, T, S> {
    pub fn new(source: &'s mut S) -> Self {
        Self {
            source,
            memo: HashMap::new(),
        }
    }

    pub fn cumulant(&mut self, state: State, word: &[usize]) -> Result<T> {
        if word.is_empty() {
            return Err(Error::Precondition(
                "cumulants take at least one argument".into(),
            ));
        }
        if let Some(v) = self.memo.get(&(state, word.to_vec())) {
            return Ok(v.clone());
        }
        let n = word.len();
        let mut value = self.source.moment(state, word)?;
        // proper position sets {0 = s_1 < ... < s_k} ⊊ {0..n-1}
        for mask in 0..(1usize << (n - 1)) {
            if mask == (1 << (n - 1)) - 1 {
                continue;
            }
            let mut positions = vec![0];
            positions.extend((1..n).filter(|i| mask & (1 << (i - 1)) != 0));
            let last = *positions.last().expect("nonempty");
            let mut term = self.source.moment(state, &word[last + 1..])?;
            for pair in positions.windows(2) {
                if term.is_zero() {
                    break;
                }
                term = term
                    * &self
                        .source
                        .moment(State::Psi, &word[pair[0] + 1..pair[1]])?;
            }
            if term.is_zero() {
                continue;
            }
            let args: Vec<usize> = positions.iter().map(|&i| word[i]).collect();
            term = term * &self.cumulant(state, &args)?;
            value -= &term;
        }
        self.memo.insert((state, word.to_vec()), value.clone());
        Ok(value)
    }
}

/// The cumulant form of the same conditions: `R` vanishes whenever `k`
/// occurs once, `r` vanishes with `k` in front, and `R` vanishes on
/// `(k, W₁, k, W₂)` with `W₁W₂` nonempty.
pub fn check_condition_a_cumulants<T: Scalar, S: MomentSource<T> + ?Sized>(
    source: &mut S,
    m: usize,
) -> Result<ConditionAReport> {
    check_order(source, m)?;
    let alphabet = source.alphabet();
    let mut violations = Vec::new();
    let mut rec = Recorder {
        alphabet,
        violations: &mut violations,
        checks: 0,
    };
    let mut cum = MixedCumulants::new(source);
    for (k, w) in cases(alphabet, m.saturating_sub(1)) {
        let r = w.len();
        for pos in 0..=r {
            let word = insert(&w, pos, k);
            let v = cum.cumulant(State::Phi, &word)?;
            rec.check(ConditionId::Singleton1, word, k, T::zero(), v);
        }
        let word = insert(&w, 0, k);
        let v = cum.cumulant(State::Psi, &word)?;
        rec.check(ConditionId::Singleton2, word, k, T::zero(), v);
        if r >= 1 && r + 2 <= m {
            for p in 0..=r {
                let word = kargin_word(k, &w, p);
                let v = cum.cumulant(State::Phi, &word)?;
                rec.check(ConditionId::Kargin2, word, k, T::zero(), v);
            }
        }
    }
    let checks = rec.checks;
    Ok(finish(CheckForm::Cumulant, m, checks, violations))
}

/// The two forms agree: singleton conditions hold in both or in neither,
/// and when they hold the factorization holds in both or in neither.
pub fn forms_agree(moment: &ConditionAReport, cumulant: &ConditionAReport) -> bool {
    let singles = |r: &ConditionAReport| {
        !r.fails(ConditionId::Singleton1) && !r.fails(ConditionId::Singleton2)
    };
    if singles(moment) != singles(cumulant) {
        return false;
    }
    !singles(moment) || moment.fails(ConditionId::Kargin2) == cumulant.fails(ConditionId::Kargin2)
}

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::partition::SetPartition;
use crate::error::{Error, Result};
use crate::freeprod::{CFreeFamily, State, WordEvaluator};
use crate::laws::{MomentSequence, TwoStateLaw};
use crate::scalar::Scalar;

/// Which words a source can be asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    /// Letters `0..L` of a concrete family.
    Finite(usize),
    /// Any letters; values depend only on the pattern of the word.
    Exchangeable,
}

/// Joint φ- and ψ-moments of words in a sequence of variables.
pub trait MomentSource<T: Scalar> {
    fn moment(&mut self, state: State, word: &[usize]) -> Result<T>;
    /// Longest word the source can evaluate.
    fn max_order(&self) -> usize;
    fn alphabet(&self) -> Alphabet;
}

/// An exchangeable joint-moment model: the value of a word depends only on
/// its set partition pattern.
pub trait PatternOracle<T: Scalar>: Sync {
    fn pattern_moment(&self, pattern: &SetPartition, state: State) -> Result<T>;
    fn max_order(&self) -> usize;
    fn name(&self) -> &str;
}

/// A family evaluated through the word engine.
pub struct FamilySource<'a, T> {
    evaluator: WordEvaluator<'a, T>,
}

impl<'a, T: Scalar> FamilySource<'a, T> {
    pub fn new(family: &'a CFreeFamily<T>) -> Self {
        Self {
            evaluator: family.evaluator(),
        }
    }
}

impl<T: Scalar> MomentSource<T> for FamilySource<'_, T> {
    fn moment(&mut self, state: State, word: &[usize]) -> Result<T> {
        self.evaluator.moment(state, word)
    }

    fn max_order(&self) -> usize {
        self.evaluator.family().max_word_len()
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::Finite(self.evaluator.family().len())
    }
}

/// Words evaluated through a pattern oracle, cached per pattern.
pub struct PatternSource<'o, T> {
    oracle: &'o dyn PatternOracle<T>,
    cache: HashMap<(State, SetPartition), T>,
}

impl<'o, T: Scalar> PatternSource<'o, T> {
    pub fn new(oracle: &'o dyn PatternOracle<T>) -> Self {
        Self {
            oracle,
            cache: HashMap::new(),
        }
    }
}

impl<T: Scalar> MomentSource<T> for PatternSource<'_, T> {
    fn moment(&mut self, state: State, word: &[usize]) -> Result<T> {
        if word.len() > self.oracle.max_order() {
            return Err(Error::OrderExceeded {
                requested: word.len(),
                supported: self.oracle.max_order(),
            });
        }
        let p = SetPartition::of_word(word);
        if let Some(v) = self.cache.get(&(state, p.clone())) {
            return Ok(v.clone());
        }
        let v = self.oracle.pattern_moment(&p, state)?;
        self.cache.insert((state, p), v.clone());
        Ok(v)
    }

    fn max_order(&self) -> usize {
        self.oracle.max_order()
    }

    fn alphabet(&self) -> Alphabet {
        Alphabet::Exchangeable
    }
}

fn check_len(p: &SetPartition, max: usize) -> Result<()> {
    if p.len() > max {
        return Err(Error::OrderExceeded {
            requested: p.len(),
            supported: max,
        });
    }
    Ok(())
}

/// Identically distributed free copies of one law.
#[derive(Debug)]
pub struct FreeOracle<T> {
    family: CFreeFamily<T>,
    cache: Mutex<HashMap<(State, SetPartition), T>>,
}

impl<T: Scalar> FreeOracle<T> {
    /// Supports words up to `max_order`, which may not exceed the law's
    /// order.
    pub fn new(law: &TwoStateLaw<T>, max_order: usize) -> Result<Self> {
        if max_order > law.order() {
            return Err(Error::OrderExceeded {
                requested: max_order,
                supported: law.order(),
            });
        }
        let family = CFreeFamily::identical(&law.truncate(max_order), max_order.max(1))?;
        Ok(Self {
            family,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn law(&self) -> &TwoStateLaw<T> {
        self.family.law(0)
    }
}

impl<T: Scalar> PatternOracle<T> for FreeOracle<T> {
    fn pattern_moment(&self, pattern: &SetPartition, state: State) -> Result<T> {
        check_len(pattern, self.max_order())?;
        let key = (state, pattern.clone());
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = self.family.evaluator().moment(state, pattern.labels())?;
        self.cache
            .lock()
            .expect("cache lock")
            .insert(key, v.clone());
        Ok(v)
    }

    fn max_order(&self) -> usize {
        self.family.max_word_len()
    }

    fn name(&self) -> &str {
        "free"
    }
}

/// Commuting classically independent copies: a word's moment is the product
/// over its blocks of the one-variable moments of the block sizes.
#[derive(Debug, Clone)]
pub struct ClassicalOracle<T> {
    phi: MomentSequence<T>,
    psi: MomentSequence<T>,
}

impl<T: Scalar> ClassicalOracle<T> {
    pub fn new(law: &TwoStateLaw<T>) -> Self {
        Self {
            phi: law.phi().clone(),
            psi: law.psi().clone(),
        }
    }
}

impl<T: Scalar> PatternOracle<T> for ClassicalOracle<T> {
    fn pattern_moment(&self, pattern: &SetPartition, state: State) -> Result<T> {
        check_len(pattern, self.max_order())?;
        let m = match state {
            State::Phi => &self.phi,
            State::Psi => &self.psi,
        };
        Ok(pattern
            .block_sizes()
            .iter()
            .fold(T::one(), |acc, &k| acc * m.get(k)))
    }

    fn max_order(&self) -> usize {
        self.phi.order()
    }

    fn name(&self) -> &str {
        "classical"
    }
}

/// A base oracle with one pattern value overridden.
pub struct PlantedOracle<T, O> {
    base: O,
    pattern: SetPartition,
    state: State,
    value: T,
}

impl<T: Scalar, O: PatternOracle<T>> PlantedOracle<T, O> {
    pub fn new(base: O, pattern: SetPartition, state: State, value: T) -> Self {
        Self {
            base,
            pattern,
            state,
            value,
        }
    }
}

impl<T: Scalar, O: PatternOracle<T>> PatternOracle<T> for PlantedOracle<T, O> {
    fn pattern_moment(&self, pattern: &SetPartition, state: State) -> Result<T> {
        if state == self.state && *pattern == self.pattern {
            return Ok(self.value.clone());
        }
        self.base.pattern_moment(pattern, state)
    }

    fn max_order(&self) -> usize {
        self.base.max_order()
    }

    fn name(&self) -> &str {
        "planted"
    }
}

/// One tabulated value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternEntry {
    pub pattern: Vec<usize>,
    pub value: String,
}

/// File form of a user-supplied oracle. Patterns absent from a table have
/// value 0; the empty word always has value 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableOracleSpec {
    pub max_order: usize,
    #[serde(default)]
    pub phi: Vec<PatternEntry>,
    #[serde(default)]
    pub psi: Vec<PatternEntry>,
}

#[derive(Debug, Clone)]
pub struct TableOracle<T> {
    max_order: usize,
    values: HashMap<(State, SetPartition), T>,
}

impl<T: Scalar> TableOracle<T> {
    pub fn from_spec(spec: &TableOracleSpec) -> Result<Self> {
        let mut values = HashMap::new();
        for (state, entries) in [(State::Phi, &spec.phi), (State::Psi, &spec.psi)] {
            for e in entries {
                let p = SetPartition::from_labels(e.pattern.clone())?;
                check_len(&p, spec.max_order)?;
                if values
                    .insert((state, p), T::parse_scalar(&e.value)?)
                    .is_some()
                {
                    return Err(Error::InvalidParameter(format!(
                        "pattern {:?} listed twice under {state}",
                        e.pattern
                    )));
                }
            }
        }
        Ok(Self {
            max_order: spec.max_order,
            values,
        })
    }
}

impl<T: Scalar> PatternOracle<T> for TableOracle<T> {
    fn pattern_moment(&self, pattern: &SetPartition, state: State) -> Result<T> {
        check_len(pattern, self.max_order)?;
        if pattern.is_empty() {
            return Ok(T::one());
        }
        Ok(self
            .values
            .get(&(state, pattern.clone()))
            .cloned()
            .unwrap_or_else(T::zero))
    }

    fn max_order(&self) -> usize {
        self.max_order
    }

    fn name(&self) -> &str {
        "table"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{semicircle_moments, symmetric_bernoulli};
    use crate::scalar::{rat, Rational};

    fn p(v: &[usize]) -> SetPartition {
        SetPartition::from_labels(v.to_vec()).unwrap()
    }

    #[test]
    fn free_oracle_matches_family() {
        let law = TwoStateLaw::new(
            symmetric_bernoulli::<Rational>(6),
            semicircle_moments(&rat(1, 1), 6).unwrap(),
        )
        .unwrap();
        let o = FreeOracle::new(&law, 6).unwrap();
        let fam = CFreeFamily::identical(&law, 3).unwrap();
        for w in [vec![0, 1, 0, 1], vec![0, 0, 1, 1], vec![0, 1, 2, 1, 0, 2]] {
            for s in [State::Phi, State::Psi] {
                let expect = fam.evaluator().moment(s, &w).unwrap();
                assert_eq!(
                    o.pattern_moment(&SetPartition::of_word(&w), s).unwrap(),
                    expect
                );
            }
        }
        assert!(o.pattern_moment(&p(&[0; 7]), State::Phi).is_err());
    }

    #[test]
    fn classical_oracle_multiplies_blocks() {
        let law = TwoStateLaw::single_state(semicircle_moments(&rat(1, 1), 4).unwrap());
        let o = ClassicalOracle::new(&law);
        assert_eq!(
            o.pattern_moment(&p(&[0, 1, 0, 1]), State::Phi).unwrap(),
            rat(1, 1)
        );
        assert_eq!(
            o.pattern_moment(&p(&[0, 0, 0, 0]), State::Phi).unwrap(),
            rat(2, 1)
        );
    }

    #[test]
    fn table_oracle_defaults_to_zero() {
        let spec: TableOracleSpec = serde_json::from_str(
            r#"{"max_order":4,"phi":[{"pattern":[0,0],"value":"2"}],"psi":[{"pattern":[0,0],"value":"1"}]}"#,
        )
        .unwrap();
        let o = TableOracle::<Rational>::from_spec(&spec).unwrap();
        assert_eq!(
            o.pattern_moment(&p(&[0, 0]), State::Phi).unwrap(),
            rat(2, 1)
        );
        assert_eq!(
            o.pattern_moment(&p(&[0, 1]), State::Phi).unwrap(),
            rat(0, 1)
        );
        assert_eq!(o.pattern_moment(&p(&[]), State::Psi).unwrap(), rat(1, 1));
        let bad: TableOracleSpec =
            serde_json::from_str(r#"{"max_order":1,"phi":[{"pattern":[0,0],"value":"2"}]}"#)
                .unwrap();
        assert!(TableOracle::<Rational>::from_spec(&bad).is_err());
    }

    #[test]
    fn pattern_source_canonicalizes() {
        let law = TwoStateLaw::single_state(semicircle_moments(&rat(1, 1), 4).unwrap());
        let o = ClassicalOracle::new(&law);
        let mut s = PatternSource::new(&o);
        assert_eq!(s.moment(State::Phi, &[9, 4, 9, 4]).unwrap(), rat(1, 1));
        assert_eq!(s.alphabet(), Alphabet::Exchangeable);
    }
}

//! Finitely generated groups of disk automorphisms.
//!
//! Provides named generator presentations, breadth-first enumeration of
//! freely reduced words up to a word length, and unitary characters given
//! by one unimodular value per generator.

use crate::moebius::{MapClass, MoebiusMap};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("generator {name} is elliptic; only hyperbolic or parabolic generators are supported")]
    EllipticGenerator { name: String },
    #[error("generator {name} is the identity map")]
    IdentityGenerator { name: String },
    #[error("distinct reduced words {word_a} and {word_b} give the same map in a presentation marked free")]
    CollisionWarning { word_a: Word, word_b: Word },
    #[error("word letter references generator {index} but the presentation has {count}")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("character value {value} for generator {name} is not unimodular")]
    NonUnimodularCharacter { name: String, value: Complex64 },
}

/// Freely reduced word over signed 1-based generator indices.
///
/// Letter k > 0 is the k-th generator, -k its inverse. Reduced means no
/// adjacent letter is followed by its own inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reversed word with each letter negated.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    /// Total order used for deterministic enumeration: letters are ranked
    /// g1 < g1^-1 < g2 < g2^-1 < ...
    fn letter_rank(letter: i32) -> (u32, bool) {
        (letter.unsigned_abs(), letter < 0)
    }

    pub fn lex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        let ranks_a = self.0.iter().map(|&l| Self::letter_rank(l));
        let ranks_b = other.0.iter().map(|&l| Self::letter_rank(l));
        ranks_a.cmp(ranks_b)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            if *l > 0 {
                write!(f, "g{l}")?;
            } else {
                write!(f, "g{}^-1", -l)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Generator {
    pub name: String,
    pub map: MoebiusMap,
}

/// Generating set of a group of disk automorphisms.
#[derive(Debug, Clone)]
pub struct GroupPresentation {
    generators: Vec<Generator>,
    assume_free: bool,
}

impl GroupPresentation {
    /// Validates that no generator is elliptic or the identity.
    ///
    /// `assume_free` asserts that distinct reduced words give distinct
    /// maps; enumeration then treats a numerical collision as an error
    /// instead of merging the words.
    pub fn new(generators: Vec<Generator>, assume_free: bool) -> Result<Self, GroupError> {
        for g in &generators {
            match g.map.classify(1e-9) {
                MapClass::Identity => {
                    return Err(GroupError::IdentityGenerator {
                        name: g.name.clone(),
                    })
                }
                MapClass::Elliptic => {
                    return Err(GroupError::EllipticGenerator {
                        name: g.name.clone(),
                    })
                }
                MapClass::Hyperbolic | MapClass::Parabolic => {}
            }
        }
        Ok(GroupPresentation {
            generators,
            assume_free,
        })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn assume_free(&self) -> bool {
        self.assume_free
    }

    fn letter_map(&self, letter: i32) -> MoebiusMap {
        let idx = (letter.unsigned_abs() as usize) - 1;
        let map = self.generators[idx].map;
        if letter < 0 {
            map.inverse()
        } else {
            map
        }
    }
}

/// One group element of a truncation: a reduced word and its map.
#[derive(Debug, Clone)]
pub struct GroupElement {
    pub word: Word,
    pub map: MoebiusMap,
}

/// All distinct group elements with reduced word length at most
/// `max_word_length`, in (length, lexicographic) order.
///
/// The identity is always element 0. `inverse_closed` records that every
/// element's inverse map is also present, which full enumerations satisfy.
#[derive(Debug, Clone)]
pub struct Truncation {
    elements: Vec<GroupElement>,
    max_word_length: usize,
    inverse_closed: bool,
}

impl Truncation {
    /// Builds a truncation from explicit elements, detecting inverse
    /// closure by scanning for each element's inverse map within `tol_map`.
    pub fn from_elements(
        elements: Vec<GroupElement>,
        max_word_length: usize,
        tol_map: f64,
    ) -> Self {
        let inverse_closed = inverse_closure_scan(&elements, tol_map);
        Truncation {
            elements,
            max_word_length,
            inverse_closed,
        }
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max_word_length(&self) -> usize {
        self.max_word_length
    }

    pub fn inverse_closed(&self) -> bool {
        self.inverse_closed
    }
}

fn inverse_closure_scan(elements: &[GroupElement], tol_map: f64) -> bool {
    elements.iter().all(|e| {
        let inv = e.map.inverse();
        elements.iter().any(|f| f.map.approx_eq(&inv, tol_map))
    })
}

/// Enumerates all freely reduced words of length <= `max_len` breadth
/// first, composing maps letter by letter.
///
/// Words whose maps agree within `tol_map` are merged, keeping the first
/// (shortest, then lexicographically smallest) word. In a presentation
/// marked free such a merge is reported as a collision instead.
pub fn enumerate(
    p: &GroupPresentation,
    max_len: usize,
    tol_map: f64,
) -> Result<Truncation, GroupError> {
    let n = p.rank() as i32;
    let mut letters: Vec<i32> = Vec::with_capacity(2 * n as usize);
    for k in 1..=n {
        letters.push(k);
        letters.push(-k);
    }

    let mut elements = vec![GroupElement {
        word: Word::empty(),
        map: MoebiusMap::identity(),
    }];
    let mut frontier: Vec<usize> = vec![0];

    for _ in 0..max_len {
        let mut next_frontier = Vec::new();
        for &idx in &frontier {
            let (parent_word, parent_map) = {
                let e = &elements[idx];
                (e.word.clone(), e.map)
            };
            let last = parent_word.0.last().copied();
            for &l in &letters {
                if last == Some(-l) {
                    continue;
                }
                let mut w = parent_word.0.clone();
                w.push(l);
                let word = Word(w);
                let map = parent_map.compose(&p.letter_map(l));
                if let Some(prev) = elements.iter().find(|e| e.map.approx_eq(&map, tol_map)) {
                    if p.assume_free() {
                        return Err(GroupError::CollisionWarning {
                            word_a: prev.word.clone(),
                            word_b: word,
                        });
                    }
                    continue;
                }
                elements.push(GroupElement { word, map });
                next_frontier.push(elements.len() - 1);
            }
        }
        frontier = next_frontier;
    }

    Ok(Truncation::from_elements(elements, max_len, tol_map))
}

/// Unitary character: one unimodular value per generator, extended to
/// words multiplicatively with conjugation on inverse letters.
#[derive(Debug, Clone)]
pub struct Character {
    values: Vec<Complex64>,
}

impl Character {
    pub fn new(
        values: Vec<Complex64>,
        names: &[String],
        tol: f64,
    ) -> Result<Self, GroupError> {
        for (v, name) in values.iter().zip(names) {
            if (v.norm() - 1.0).abs() > tol {
                return Err(GroupError::NonUnimodularCharacter {
                    name: name.clone(),
                    value: *v,
                });
            }
        }
        Ok(Character { values })
    }

    pub fn identity(rank: usize) -> Self {
        Character {
            values: vec![Complex64::new(1.0, 0.0); rank],
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Pointwise product, the group operation on the character torus.
    pub fn product(&self, other: &Character) -> Character {
        assert_eq!(self.values.len(), other.values.len());
        Character {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x * y)
                .collect(),
        }
    }

    /// chi(word) = prod chi(g_k)^{sign}, with conj on inverse letters.
    pub fn eval(&self, word: &Word) -> Result<Complex64, GroupError> {
        let mut out = Complex64::new(1.0, 0.0);
        for &l in &word.0 {
            let idx = (l.unsigned_abs() as usize) - 1;
            if idx >= self.values.len() {
                return Err(GroupError::IndexOutOfRange {
                    index: idx + 1,
                    count: self.values.len(),
                });
            }
            out *= if l > 0 {
                self.values[idx]
            } else {
                self.values[idx].conj()
            };
        }
        Ok(out)
    }
}

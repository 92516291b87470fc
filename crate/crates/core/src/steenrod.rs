//! The mod 2 Steenrod algebra in the admissible (Serre–Cartan) basis.
//!
//! Composites `Sq^{i_1} ⋯ Sq^{i_k}` are rewritten into sums of admissible
//! monomials with the Adem relations. Independently, [`cartan`] evaluates
//! the same composites on polynomials in degree-one classes; the two
//! agree, and the tests hold them to it.

pub mod cartan;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::em_cohomology::{self, Poly};
use crate::error::{Error, Result};

/// Admissible sequence `I = (i_1, …, i_k)` with `i_j >= 2 i_{j+1}` and all entries positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdmissibleSequence(Vec<u32>);

impl AdmissibleSequence {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.contains(&0) || !is_admissible(&entries) {
            return Err(Error::InvalidParameters(format!(
                "{entries:?} is not an admissible sequence"
            )));
        }
        Ok(Self(entries))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `i_1 − (i_2 + … + i_k)`; zero for the empty sequence.
    pub fn excess(&self) -> u32 {
        match self.0.split_first() {
            None => 0,
            Some((first, rest)) => first - rest.iter().sum::<u32>(),
        }
    }

    /// The sequence with its first entry removed.
    pub fn tail(&self) -> Self {
        Self(self.0.get(1..).map(<[u32]>::to_vec).unwrap_or_default())
    }

    /// `Sum_j j * i_j`, which strictly drops under each Adem rewrite.
    pub fn moment(&self) -> u64 {
        moment(&self.0)
    }

    /// Label in the `Sq[a,b]` form; empty string for the identity.
    pub fn label(&self) -> String {
        if self.0.is_empty() {
            String::new()
        } else {
            let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
            format!("Sq[{}]", parts.join(","))
        }
    }
}

impl fmt::Display for AdmissibleSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", self.label())
        }
    }
}

pub fn is_admissible(word: &[u32]) -> bool {
    word.windows(2).all(|w| w[0] >= 2 * w[1])
}

pub(crate) fn moment(word: &[u32]) -> u64 {
    word.iter()
        .enumerate()
        .map(|(j, &i)| (j as u64 + 1) * u64::from(i))
        .sum()
}

/// `binom(n, k) mod 2` by Lucas' theorem.
pub fn binomial_mod2(n: u64, k: u64) -> bool {
    k <= n && (k & !n) == 0
}

/// The right-hand side of the Adem relation for `Sq^a Sq^b` with `a < 2b`:
/// the pairs `(a+b−c, c)` whose coefficient `binom(b−c−1, a−2c)` is odd.
/// A pair with `c = 0` stands for the single operation `Sq^{a+b}`.
pub fn adem_relation(a: u32, b: u32) -> Vec<(u32, u32)> {
    debug_assert!(a < 2 * b);
    (0..=a / 2)
        .filter(|&c| binomial_mod2(u64::from(b - c - 1), u64::from(a - 2 * c)))
        .map(|c| (a + b - c, c))
        .collect()
}

/// A homogeneous element of the Steenrod algebra: a set of admissible monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SteenrodElement {
    pub degree: u32,
    pub terms: BTreeSet<AdmissibleSequence>,
}

impl SteenrodElement {
    pub fn zero(degree: u32) -> Self {
        Self {
            degree,
            terms: BTreeSet::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Position of the leftmost pair `(w_j, w_{j+1})` with `w_j < 2 w_{j+1}`.
fn leftmost_inadmissible(word: &[u32]) -> Option<usize> {
    word.windows(2).position(|w| w[0] < 2 * w[1])
}

/// One Adem rewrite of the leftmost inadmissible pair, or `None` if `word` is admissible.
pub(crate) fn rewrite_step(word: &[u32]) -> Option<Vec<Vec<u32>>> {
    let j = leftmost_inadmissible(word)?;
    let (a, b) = (word[j], word[j + 1]);
    Some(
        adem_relation(a, b)
            .into_iter()
            .map(|(hi, lo)| {
                let mut w = Vec::with_capacity(word.len());
                w.extend_from_slice(&word[..j]);
                w.push(hi);
                if lo > 0 {
                    w.push(lo);
                }
                w.extend_from_slice(&word[j + 2..]);
                w
            })
            .collect(),
    )
}

fn adem_cache() -> &'static Mutex<HashMap<Vec<u32>, SteenrodElement>> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<u32>, SteenrodElement>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Rewrites the composite `Sq^{w_1} ⋯ Sq^{w_k}` into admissible form.
///
/// Zero entries are `Sq^0 = 1` and are dropped.
pub fn adem_reduce(word: &[u32]) -> SteenrodElement {
    let word: Vec<u32> = word.iter().copied().filter(|&e| e > 0).collect();
    if let Some(hit) = adem_cache().lock().expect("adem cache poisoned").get(&word) {
        return hit.clone();
    }
    let degree = word.iter().sum();
    let mut pending: BTreeMap<Vec<u32>, ()> = BTreeMap::new();
    pending.insert(word.clone(), ());
    let mut result = BTreeSet::new();
    while let Some((w, ())) = pending.pop_first() {
        match rewrite_step(&w) {
            None => toggle(&mut result, AdmissibleSequence(w)),
            Some(children) => {
                for c in children {
                    if pending.remove(&c).is_none() {
                        pending.insert(c, ());
                    }
                }
            }
        }
    }
    let out = SteenrodElement {
        degree,
        terms: result,
    };
    adem_cache()
        .lock()
        .expect("adem cache poisoned")
        .insert(word, out.clone());
    out
}

fn toggle<T: Ord>(set: &mut BTreeSet<T>, x: T) {
    if !set.remove(&x) {
        set.insert(x);
    }
}

/// All admissible sequences of exactly the given degree.
pub fn admissible_of_degree(degree: u32) -> Vec<AdmissibleSequence> {
    fn extend(remaining: u32, max_next: u32, prefix: &mut Vec<u32>, out: &mut Vec<AdmissibleSequence>) {
        if remaining == 0 {
            out.push(AdmissibleSequence(prefix.clone()));
            return;
        }
        for x in (1..=remaining.min(max_next)).rev() {
            prefix.push(x);
            extend(remaining - x, x / 2, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(degree, degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Evaluates `Sq^I ι_n` in `H*(K(Z/2, n))` as a polynomial in the
/// generators `Sq^J ι_n` (excess `J` < n).
///
/// The word is first reduced to admissible form; each admissible term
/// `J` then evaluates by instability: zero if its leading entry exceeds
/// the degree it acts on, the square of the remaining evaluation if it
/// equals that degree, and a polynomial generator when `excess(J) < n`.
pub fn unstable_evaluate(word: &[u32], n: u32) -> Poly {
    let mut out = Poly::zero();
    for term in adem_reduce(word).terms {
        out += &em_cohomology::evaluate_admissible(&term, 0, 0, n);
    }
    out
}

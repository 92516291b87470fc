//! Steenrod squares on `F2[x_1, …, x_N]` with every `x_i` of degree one.
//!
//! Only the defining rules are used: `Sq^0 x = x`, `Sq^1 x = x^2`,
//! `Sq^i x = 0` for `i > 1`, and the Cartan formula. No Adem relation
//! appears here, which is what makes this a check on [`super::adem_reduce`].
//!
//! Monomials are packed into a `u64`, `64 / N` bits per exponent (at most 16).

use std::collections::HashSet;

/// A polynomial over F2 in `nvars` degree-one variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: HashSet<u64>,
}

fn field_bits(nvars: usize) -> u32 {
    assert!((1..=64).contains(&nvars), "between 1 and 64 variables");
    (64 / nvars as u32).min(16)
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        field_bits(nvars);
        Self {
            nvars,
            terms: HashSet::new(),
        }
    }

    pub fn monomial(exponents: Vec<u16>) -> Self {
        let mut p = Self::zero(exponents.len());
        let packed = p.pack(&exponents);
        p.terms.insert(packed);
        p
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn bits(&self) -> u32 {
        field_bits(self.nvars)
    }

    fn pack(&self, exps: &[u16]) -> u64 {
        let b = self.bits();
        exps.iter().enumerate().fold(0u64, |acc, (i, &e)| {
            assert!(u64::from(e) < 1 << b, "exponent {e} does not fit in {b} bits");
            acc | u64::from(e) << (i as u32 * b)
        })
    }

    fn unpack(&self, m: u64) -> Vec<u16> {
        let b = self.bits();
        let mask = (1u64 << b) - 1;
        (0..self.nvars).map(|i| (m >> (i as u32 * b) & mask) as u16).collect()
    }

    /// Exponent vectors of the terms, sorted.
    pub fn terms(&self) -> Vec<Vec<u16>> {
        let mut out: Vec<Vec<u16>> = self.terms.iter().map(|&m| self.unpack(m)).collect();
        out.sort();
        out
    }

    fn toggle(&mut self, m: u64) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add_monomial(&mut self, exps: Vec<u16>) {
        let m = self.pack(&exps);
        self.toggle(m);
    }

    pub fn add(&mut self, other: &Polynomial) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        for &t in &other.terms {
            self.toggle(t);
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for a in self.terms() {
            for b in other.terms() {
                out.add_monomial(a.iter().zip(&b).map(|(x, y)| x + y).collect());
            }
        }
        out
    }

    /// The homogeneous component of the given total degree.
    pub fn homogeneous_part(&self, degree: u32) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for t in self.terms() {
            if t.iter().map(|&e| u32::from(e)).sum::<u32>() == degree {
                out.add_monomial(t);
            }
        }
        out
    }
}

/// Evaluates squares with the single-variable rule built from Cartan's formula.
#[derive(Default)]
pub struct CartanOracle {
    /// `power[a][j]` is the coefficient of `x^{a+j}` in `Sq^j(x^a)`.
    power: Vec<Vec<bool>>,
}

impl CartanOracle {
    pub fn new() -> Self {
        Self { power: vec![vec![true]] }
    }

    /// `Sq^j(x · x^{a-1}) = x Sq^j(x^{a-1}) + x^2 Sq^{j-1}(x^{a-1})`, so the
    /// coefficients obey Pascal's rule.
    fn power_row(&mut self, a: usize) -> &[bool] {
        if self.power.is_empty() {
            self.power.push(vec![true]);
        }
        while self.power.len() <= a {
            let prev = self.power.last().expect("row zero exists");
            let n = prev.len() + 1;
            let row = (0..n)
                .map(|j| {
                    let keep = prev.get(j).copied().unwrap_or(false);
                    let shift = j > 0 && prev.get(j - 1).copied().unwrap_or(false);
                    keep ^ shift
                })
                .collect();
            self.power.push(row);
        }
        &self.power[a]
    }

    fn sq_packed(&mut self, k: u32, m: u64, bits: u32, nvars: usize, out: &mut Polynomial) {
        let mask = (1u64 << bits) - 1;
        let exps: Vec<usize> = (0..nvars).map(|i| (m >> (i as u32 * bits) & mask) as usize).collect();
        assert!(
            exps.iter().all(|&a| a + a.min(k as usize) <= mask as usize),
            "exponent overflow in a {bits}-bit field"
        );
        let rows: Vec<Vec<usize>> = exps
            .iter()
            .map(|&a| {
                let row = self.power_row(a);
                (0..row.len()).filter(|&j| row[j]).collect()
            })
            .collect();
        // Cartan: distribute k over the variables
        fn go(i: usize, left: usize, acc: u64, rows: &[Vec<usize>], bits: u32, out: &mut Polynomial) {
            if i == rows.len() {
                if left == 0 {
                    out.toggle(acc);
                }
                return;
            }
            for &j in rows[i].iter().take_while(|&&j| j <= left) {
                go(i + 1, left - j, acc + ((j as u64) << (i as u32 * bits)), rows, bits, out);
            }
        }
        go(0, k as usize, m, &rows, bits, out);
    }

    pub fn sq(&mut self, k: u32, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(p.nvars);
        let bits = p.bits();
        for &m in &p.terms {
            self.sq_packed(k, m, bits, p.nvars, &mut out);
        }
        out
    }

    /// `Sq^k` of a single monomial.
    pub fn sq_monomial(&mut self, k: u32, exps: &[u16]) -> Polynomial {
        self.sq(k, &Polynomial::monomial(exps.to_vec()))
    }

    /// Applies `Sq^{w_1} ⋯ Sq^{w_k}` right to left.
    pub fn act(&mut self, word: &[u32], p: &Polynomial) -> Polynomial {
        word.iter().rev().fold(p.clone(), |acc, &k| self.sq(k, &acc))
    }
}

/// One-shot form of [`CartanOracle::act`].
pub fn cartan_action(word: &[u32], p: &Polynomial) -> Polynomial {
    CartanOracle::new().act(word, p)
}

//! Text form of classes: `Sq[a,b]i{n}` for generators, with `_k` naming the
//! k-th fundamental class of degree `n` when there is more than one, `^e`
//! for powers, `*` for products and ` + ` for sums.

use std::sync::OnceLock;

use regex::Regex;

use super::{evaluate_admissible, EMGenerator, Monomial, Poly, Slot, SpaceDescriptor};
use crate::error::{Error, Result};
use crate::steenrod::{adem_reduce, admissible_of_degree};

fn slots_of_degree(space: &SpaceDescriptor, n: u32) -> Vec<Slot> {
    space
        .slots()
        .into_iter()
        .filter(|&s| space.slot_degree(s) == n)
        .collect()
}

fn fundamental_label(space: &SpaceDescriptor, slot: Slot, n: u32) -> String {
    let same = slots_of_degree(space, n);
    if same.len() > 1 {
        let k = same.iter().position(|&s| s == slot).map_or(0, |p| p + 1);
        format!("i{n}_{k}")
    } else {
        format!("i{n}")
    }
}

pub fn generator_label(space: &SpaceDescriptor, g: &EMGenerator) -> String {
    let base = fundamental_label(space, g.slot(), g.base_degree);
    if g.op.is_empty() {
        base
    } else {
        format!("{}{}", g.op.label(), base)
    }
}

pub fn monomial_label(space: &SpaceDescriptor, m: &Monomial) -> String {
    if m.is_unit() {
        return "1".into();
    }
    m.powers()
        .iter()
        .map(|(g, e)| {
            let l = generator_label(space, g);
            if *e > 1 {
                format!("{l}^{e}")
            } else {
                l
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

pub fn poly_label(space: &SpaceDescriptor, p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.terms()
        .map(|m| monomial_label(space, m))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn factor_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^(?:Sq\[([0-9,\s]*)\])?i(\d+)(?:_(\d+))?(?:\^(\d+))?$").expect("static regex")
    })
}

fn parse_number(s: &str) -> Result<u32> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number '{s}'")))
}

fn evaluate_word(word: &[u32], slot: Slot, n: u32) -> Poly {
    let mut out = Poly::zero();
    for term in adem_reduce(word).terms {
        out += &evaluate_admissible(&term, slot.0, slot.1, n);
    }
    out
}

fn parse_factor(space: &SpaceDescriptor, text: &str) -> Result<Poly> {
    if text == "1" {
        return Ok(Poly::one());
    }
    let caps = factor_regex()
        .captures(text)
        .ok_or_else(|| Error::Parse(format!("bad factor '{text}'")))?;
    let word = match caps.get(1) {
        Some(w) if !w.as_str().trim().is_empty() => w
            .as_str()
            .split(',')
            .map(parse_number)
            .collect::<Result<Vec<_>>>()?,
        _ => Vec::new(),
    };
    let n = parse_number(&caps[2])?;
    let same = slots_of_degree(space, n);
    let slot = match (caps.get(3), same.len()) {
        (_, 0) => return Err(Error::Parse(format!("no fundamental class of degree {n} in {space}"))),
        (None, 1) => same[0],
        (None, _) => return Err(Error::Parse(format!("'{text}' is ambiguous; use i{n}_k"))),
        (Some(k), len) => {
            let k = parse_number(k.as_str())? as usize;
            if k == 0 || k > len {
                return Err(Error::Parse(format!("no class i{n}_{k} in {space}")));
            }
            same[k - 1]
        }
    };
    let e = caps.get(4).map(|e| parse_number(e.as_str())).transpose()?.unwrap_or(1);
    Ok(evaluate_word(&word, slot, n).pow(e))
}

/// Parses the text form back into a polynomial. Non-admissible words are reduced and evaluated.
pub fn parse_class(space: &SpaceDescriptor, text: &str) -> Result<Poly> {
    let text = text.trim();
    if text == "0" {
        return Ok(Poly::zero());
    }
    let mut out = Poly::zero();
    for term in text.split('+') {
        let mut prod = Poly::one();
        for factor in term.split('*') {
            prod = prod.mul(&parse_factor(space, factor.trim())?);
        }
        out += &prod;
    }
    Ok(out)
}

/// A label `Sq[I]i{n}` whose evaluation equals `p`, if one exists.
pub fn operation_label(space: &SpaceDescriptor, p: &Poly) -> Option<String> {
    let d = p.homogeneous_degree()?;
    for slot in space.slots() {
        let n = space.slot_degree(slot);
        if n > d {
            continue;
        }
        for op in admissible_of_degree(d - n) {
            if &evaluate_admissible(&op, slot.0, slot.1, n) == p {
                let base = fundamental_label(space, slot, n);
                return Some(if op.is_empty() {
                    base
                } else {
                    format!("{}{}", op.label(), base)
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em_cohomology::degree_basis;

    #[test]
    fn labels_round_trip_on_every_basis_element() {
        for text in ["K(1,2)xK(1,3)", "K(2,2)xK(1,3)", "K(1,1)xK(1,4)", "K(1,2)xK(1,2)"] {
            let x = SpaceDescriptor::parse(text).unwrap();
            for t in 0..=9 {
                for m in &degree_basis(&x, t).monomials {
                    let p = Poly::from(m.clone());
                    let label = poly_label(&x, &p);
                    assert_eq!(parse_class(&x, &label).unwrap(), p, "{label}");
                }
            }
        }
    }

    #[test]
    fn slot_suffix_only_when_ambiguous() {
        let x = SpaceDescriptor::parse("K(2,2)xK(1,3)").unwrap();
        let g = EMGenerator::fundamental(0, 1, 2);
        assert_eq!(generator_label(&x, &g), "i2_2");
        assert_eq!(generator_label(&x, &EMGenerator::fundamental(1, 0, 3)), "i3");
        assert!(parse_class(&x, "i2").is_err());
        assert!(parse_class(&x, "i2_3").is_err());
        assert!(parse_class(&x, "i5").is_err());
    }

    #[test]
    fn non_admissible_words_evaluate() {
        let k2 = SpaceDescriptor::em(1, 2);
        assert_eq!(parse_class(&k2, "Sq[2]i2").unwrap(), parse_class(&k2, "i2^2").unwrap());
        assert!(parse_class(&k2, "Sq[1,1]i2").unwrap().is_zero());
        assert!(parse_class(&k2, "Sq[3]i2").unwrap().is_zero());
        assert_eq!(poly_label(&k2, &parse_class(&k2, "i2 + i2").unwrap()), "0");
        assert_eq!(parse_class(&k2, "1").unwrap(), Poly::one());
    }

    #[test]
    fn operation_labels() {
        let k2 = SpaceDescriptor::em(1, 2);
        let sq = parse_class(&k2, "i2^2").unwrap();
        assert_eq!(operation_label(&k2, &sq).as_deref(), Some("Sq[2]i2"));
        let x = SpaceDescriptor::parse("K(1,2)xK(1,3)").unwrap();
        let p = parse_class(&x, "i2*Sq[1]i2").unwrap();
        assert_eq!(operation_label(&x, &p), None);
    }
}

//! CAR normal ordering and the Jordan–Wigner representation.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::C64;

pub type Site = u32;

/// The normal-ordered word `b*_{j_1}…b*_{j_q} b_{i_1}…b_{i_p}` with both
/// site lists strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CarWord {
    pub cr: Vec<Site>,
    pub an: Vec<Site>,
}

impl CarWord {
    pub fn unit() -> Self {
        CarWord { cr: vec![], an: vec![] }
    }

    pub fn annihilator(i: Site) -> Self {
        CarWord { cr: vec![], an: vec![i] }
    }

    pub fn creator(i: Site) -> Self {
        CarWord { cr: vec![i], an: vec![] }
    }

    pub fn is_unit(&self) -> bool {
        self.cr.is_empty() && self.an.is_empty()
    }

    pub fn is_normal(&self) -> bool {
        self.cr.windows(2).all(|w| w[0] < w[1]) && self.an.windows(2).all(|w| w[0] < w[1])
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.cr.iter().chain(self.an.iter()).copied()
    }

    fn letters(&self) -> Vec<Letter> {
        self.cr
            .iter()
            .map(|&s| Letter { site: s, dagger: true })
            .chain(self.an.iter().map(|&s| Letter { site: s, dagger: false }))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Letter {
    pub site: Site,
    pub dagger: bool,
}

/// Sorts a run of same-kind letters; returns the permutation sign, or `None`
/// if a site repeats (the product vanishes).
fn sort_with_sign(sites: &mut [Site]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..sites.len() {
        let mut j = i;
        while j > 0 && sites[j - 1] > sites[j] {
            sites.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if sites.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Rewrites an arbitrary product of generators as an integer combination of
/// normal-ordered words using `{b_i, b_j*} = 1{i=j}` and `{b_i, b_j} = 0`.
pub fn normal_order(letters: &[Letter]) -> BTreeMap<CarWord, i64> {
    let mut out: BTreeMap<CarWord, i64> = BTreeMap::new();
    let mut stack: Vec<(i64, Vec<Letter>)> = vec![(1, letters.to_vec())];
    while let Some((coeff, seq)) = stack.pop() {
        let disorder = seq.windows(2).position(|w| !w[0].dagger && w[1].dagger);
        match disorder {
            Some(k) => {
                let (a, c) = (seq[k], seq[k + 1]);
                let mut swapped = seq.clone();
                swapped.swap(k, k + 1);
                stack.push((-coeff, swapped));
                if a.site == c.site {
                    let mut contracted = seq;
                    contracted.drain(k..k + 2);
                    stack.push((coeff, contracted));
                }
            }
            None => {
                let split = seq.iter().position(|l| !l.dagger).unwrap_or(seq.len());
                let mut cr: Vec<Site> = seq[..split].iter().map(|l| l.site).collect();
                let mut an: Vec<Site> = seq[split..].iter().map(|l| l.site).collect();
                let (Some(s1), Some(s2)) = (sort_with_sign(&mut cr), sort_with_sign(&mut an)) else {
                    continue;
                };
                *out.entry(CarWord { cr, an }).or_insert(0) += coeff * s1 * s2;
            }
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

pub fn word_product(a: &CarWord, b: &CarWord) -> BTreeMap<CarWord, i64> {
    let mut letters = a.letters();
    letters.extend(b.letters());
    normal_order(&letters)
}

/// Adjoint of a normal word: a single normal word with sign.
pub fn word_star(w: &CarWord) -> (i64, CarWord) {
    let letters: Vec<Letter> = w
        .letters()
        .into_iter()
        .rev()
        .map(|l| Letter { site: l.site, dagger: !l.dagger })
        .collect();
    let res = normal_order(&letters);
    debug_assert_eq!(res.len(), 1);
    let (word, sign) = res.into_iter().next().expect("adjoint of a normal word is a word");
    (sign, word)
}

/// Jordan–Wigner image of `b_site` on the ordered site list. The first site
/// is the most significant tensor factor; each mode uses the basis
/// `(|0⟩, |1⟩)` so that `b*b = diag(0, 1)`.
pub fn jw_annihilator(sites: &[Site], site: Site) -> Result<DMatrix<C64>> {
    let k = sites.iter().position(|&s| s == site).ok_or(Error::SiteOutside(site))?;
    let n = sites.len();
    let dim = 1usize << n;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    let bit = n - 1 - k;
    for col in 0..dim {
        if col >> bit & 1 == 1 {
            let row = col & !(1 << bit);
            // parity of occupied modes before k
            let higher = col >> (bit + 1);
            let sign = if higher.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            m[(row, col)] = C64::new(sign, 0.0);
        }
    }
    Ok(m)
}

pub fn jw_word(sites: &[Site], w: &CarWord) -> Result<DMatrix<C64>> {
    let dim = 1usize << sites.len();
    let mut m = DMatrix::<C64>::identity(dim, dim);
    for &s in &w.cr {
        m *= jw_annihilator(sites, s)?.adjoint();
    }
    for &s in &w.an {
        m *= jw_annihilator(sites, s)?;
    }
    Ok(m)
}

/// Every normal-ordered word on the given sites (`4^|sites|` of them).
pub fn all_words(sites: &[Site]) -> Vec<CarWord> {
    let mut sorted = sites.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let mut words = Vec::with_capacity(1 << (2 * n));
    for cr_mask in 0..(1u32 << n) {
        for an_mask in 0..(1u32 << n) {
            let pick = |mask: u32| -> Vec<Site> {
                (0..n).filter(|k| mask >> k & 1 == 1).map(|k| sorted[k]).collect()
            };
            words.push(CarWord { cr: pick(cr_mask), an: pick(an_mask) });
        }
    }
    words.sort();
    words
}

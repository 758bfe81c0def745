use crate::error::{Error, Result};
use crate::moebius::MoebiusTransform;

use super::GroupPresentation;

/// Letter `2k` is generator `k`, letter `2k + 1` its inverse.
#[inline]
pub fn letter_transform(group: &GroupPresentation, letter: usize) -> MoebiusTransform {
    let g = group.generators[letter / 2];
    if letter % 2 == 0 {
        g
    } else {
        g.inverse()
    }
}

#[inline]
fn inverse_letter(letter: usize) -> usize {
    letter ^ 1
}

/// Number of reduced words of length `1..=max_len` over `rank` generators:
/// `Σ_k 2n (2n - 1)^{k-1}`. `None` on overflow.
pub fn reduced_word_count(rank: usize, max_len: usize) -> Option<u128> {
    let m = 2 * rank as u128;
    if m == 0 {
        return Some(0);
    }
    let mut total: u128 = 0;
    let mut level = m;
    for _ in 0..max_len {
        total = total.checked_add(level)?;
        level = level.checked_mul(m - 1)?;
    }
    Some(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedWord {
    pub letters: Vec<usize>,
    pub transform: MoebiusTransform,
}

/// Lazy depth-first stream of reduced words, in pre-order with letters
/// taken in index order. Memory use is `O(max_len)`.
pub struct ReducedWords {
    alphabet: Vec<MoebiusTransform>,
    max_len: usize,
    word: Vec<usize>,
    products: Vec<MoebiusTransform>,
    started: bool,
    done: bool,
}

pub fn enumerate_reduced_words(group: &GroupPresentation, max_len: usize) -> ReducedWords {
    let alphabet = (0..2 * group.rank()).map(|l| letter_transform(group, l)).collect();
    ReducedWords {
        alphabet,
        max_len,
        word: Vec::with_capacity(max_len),
        products: Vec::with_capacity(max_len),
        started: false,
        done: max_len == 0,
    }
}

impl ReducedWords {
    fn push(&mut self, letter: usize) {
        let next = match self.products.last() {
            Some(p) => p * &self.alphabet[letter],
            None => self.alphabet[letter],
        };
        self.word.push(letter);
        self.products.push(next);
    }

    fn first_child(&self) -> Option<usize> {
        let forbidden = self.word.last().map(|&l| inverse_letter(l));
        (0..self.alphabet.len()).find(|&l| Some(l) != forbidden)
    }

    /// Collects at most `limit` words; more is reported as a resource error.
    pub fn collect_bounded(self, limit: usize) -> Result<Vec<ReducedWord>> {
        let mut out = Vec::new();
        for w in self {
            if out.len() == limit {
                return Err(Error::ResourceLimit(format!("more than {limit} reduced words")));
            }
            out.push(w);
        }
        Ok(out)
    }
}

impl Iterator for ReducedWords {
    type Item = ReducedWord;

    fn next(&mut self) -> Option<ReducedWord> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.push(0);
        } else if self.word.len() < self.max_len {
            // the alphabet holds a generator and its inverse, so some letter
            // never cancels
            let child = self.first_child().expect("alphabet has a non-cancelling letter");
            self.push(child);
        } else {
            loop {
                let last = match self.word.pop() {
                    Some(l) => l,
                    None => {
                        self.done = true;
                        return None;
                    }
                };
                self.products.pop();
                let forbidden = self.word.last().map(|&l| inverse_letter(l));
                let sibling = (last + 1..self.alphabet.len()).find(|&l| Some(l) != forbidden);
                if let Some(s) = sibling {
                    self.push(s);
                    break;
                }
            }
        }
        Some(ReducedWord {
            letters: self.word.clone(),
            transform: *self.products.last().expect("nonempty word"),
        })
    }
}

/// Calls `visit` for every reduced word of length `≤ max_len` that starts
/// with `prefix` (the prefix itself included when nonempty), in the same
/// order as [`enumerate_reduced_words`]. The prefix must be reduced.
pub fn visit_reduced_words<F>(group: &GroupPresentation, max_len: usize, prefix: &[usize], mut visit: F)
where
    F: FnMut(&[usize], &MoebiusTransform),
{
    let alphabet: Vec<MoebiusTransform> = (0..2 * group.rank()).map(|l| letter_transform(group, l)).collect();
    let mut word: Vec<usize> = Vec::with_capacity(max_len);
    let mut product = MoebiusTransform::identity();
    for &l in prefix {
        word.push(l);
        product = product * alphabet[l];
    }
    if prefix.len() > max_len {
        return;
    }
    if !prefix.is_empty() {
        visit(&word, &product);
    }
    recurse(&alphabet, max_len, &mut word, &product, &mut visit);
}

fn recurse<F>(alphabet: &[MoebiusTransform], max_len: usize, word: &mut Vec<usize>, product: &MoebiusTransform, visit: &mut F)
where
    F: FnMut(&[usize], &MoebiusTransform),
{
    if word.len() >= max_len {
        return;
    }
    let forbidden = word.last().map(|&l| inverse_letter(l));
    for (l, g) in alphabet.iter().enumerate() {
        if Some(l) == forbidden {
            continue;
        }
        let next = product * g;
        word.push(l);
        visit(word, &next);
        recurse(alphabet, max_len, word, &next, visit);
        word.pop();
    }
}

/// All reduced words of exactly `len` letters, in enumeration order.
pub(crate) fn reduced_prefixes(rank: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            for l in 0..2 * rank {
                if w.last().map(|&x| inverse_letter(x)) != Some(l) {
                    let mut v: Vec<usize> = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::kleinian::build_octagon_group;

    fn cyclic() -> GroupPresentation {
        GroupPresentation::new("z -> 4z", vec![MoebiusTransform::dilation(Complex64::new(4.0, 0.0)).unwrap()]).unwrap()
    }

    #[test]
    fn free_cyclic_words() {
        let words: Vec<_> = enumerate_reduced_words(&cyclic(), 2).map(|w| w.letters).collect();
        assert_eq!(words, vec![vec![0], vec![0, 0], vec![1], vec![1, 1]]);
        let w = enumerate_reduced_words(&cyclic(), 2).nth(1).unwrap();
        let sixteen = w.transform.apply_boundary(crate::moebius::BoundaryPoint::from_re_im(1.0, 0.0));
        assert!((sixteen.finite().unwrap().re - 16.0).abs() < 1e-12);
    }

    #[test]
    fn counts_match_formula() {
        let g = build_octagon_group();
        let two = GroupPresentation::new("two", g.generators[..2].to_vec()).unwrap();
        assert_eq!(enumerate_reduced_words(&two, 1).count(), 4);
        assert_eq!(enumerate_reduced_words(&two, 3).count(), 52);
        assert_eq!(reduced_word_count(2, 3), Some(52));
        assert_eq!(reduced_word_count(4, 8), Some(7_686_400));
        assert_eq!(enumerate_reduced_words(&g, 4).count() as u128, reduced_word_count(4, 4).unwrap());
    }

    #[test]
    fn no_adjacent_cancellation() {
        let g = build_octagon_group();
        for w in enumerate_reduced_words(&g, 4) {
            assert!(w.letters.windows(2).all(|p| p[0] != (p[1] ^ 1)));
        }
    }

    #[test]
    fn visitor_matches_iterator() {
        let g = build_octagon_group();
        let from_iter: Vec<_> = enumerate_reduced_words(&g, 3).collect();
        let mut from_visit = Vec::new();
        visit_reduced_words(&g, 3, &[], |w, t| from_visit.push((w.to_vec(), *t)));
        assert_eq!(from_iter.len(), from_visit.len());
        for (a, (letters, t)) in from_iter.iter().zip(&from_visit) {
            assert_eq!(&a.letters, letters);
            assert!(a.transform.distance_psl(t) < 1e-10);
        }
        // prefix partition covers everything exactly once, in order
        let mut partitioned = Vec::new();
        for p in reduced_prefixes(4, 1) {
            visit_reduced_words(&g, 3, &p, |w, _| partitioned.push(w.to_vec()));
        }
        let letters: Vec<_> = from_visit.into_iter().map(|(w, _)| w).collect();
        assert_eq!(partitioned, letters);
    }

    #[test]
    fn bounded_collect_reports_resource_limit() {
        let g = build_octagon_group();
        assert!(matches!(
            enumerate_reduced_words(&g, 6).collect_bounded(1000),
            Err(Error::ResourceLimit(_))
        ));
        assert_eq!(enumerate_reduced_words(&g, 2).collect_bounded(1000).unwrap().len(), 64);
    }
}

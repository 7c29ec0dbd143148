//! Words in two letters and their inverses, and the two-sided positive
//! words whose identity probabilities the estimators bound.
//!
//! A word acts on a point left-to-right: the image of `p` under `xyX` is
//! `xinv(y(x(p)))`. The empty word is written `1` in text form.

use crate::error::{Error, Result};
use crate::perm::Permutation;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X,
    Y,
    XInv,
    YInv,
}

impl Letter {
    pub fn inverse(self) -> Self {
        match self {
            Letter::X => Letter::XInv,
            Letter::Y => Letter::YInv,
            Letter::XInv => Letter::X,
            Letter::YInv => Letter::Y,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Letter::X | Letter::Y)
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::Y => 'y',
            Letter::XInv => 'X',
            Letter::YInv => 'Y',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'x' => Ok(Letter::X),
            'y' => Ok(Letter::Y),
            'X' => Ok(Letter::XInv),
            'Y' => Ok(Letter::YInv),
            other => Err(Error::Parse(format!(
                "unknown letter {other:?}; expected one of x, y, X, Y"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    /// Parses a string of letters from `{x, y, X, Y}`; whitespace is
    /// ignored and a bare `1` denotes the empty word.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed == "1" || trimmed.is_empty() {
            return Ok(Self::empty());
        }
        let mut letters = Vec::new();
        for c in trimmed.chars() {
            if c.is_whitespace() {
                continue;
            }
            letters.push(Letter::from_char(c)?);
        }
        Ok(Self { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| l.is_positive())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self { letters }
    }

    pub fn inverse(&self) -> Self {
        let letters = self.letters.iter().rev().map(|l| l.inverse()).collect();
        Self { letters }
    }

    /// Cancels adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> Self {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &letter in &self.letters {
            if stack.last() == Some(&letter.inverse()) {
                stack.pop();
            } else {
                stack.push(letter);
            }
        }
        Self { letters: stack }
    }

    /// Free reduction followed by cancelling mutually inverse first and
    /// last letters, so the result has no cancellation even read cyclically.
    pub fn cyclic_reduce(&self) -> Self {
        let mut letters = self.free_reduce().letters;
        let mut start = 0;
        let mut end = letters.len();
        while end - start >= 2 && letters[start] == letters[end - 1].inverse() {
            start += 1;
            end -= 1;
        }
        letters.truncate(end);
        letters.drain(..start);
        Self { letters }
    }

    /// Evaluates the word at a pair of same-degree permutations.
    pub fn evaluate(&self, x: &Permutation, y: &Permutation) -> Result<Permutation> {
        Ok(WordEvaluator::new(x.clone(), y.clone())?.evaluate(self))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for &letter in &self.letters {
            write!(f, "{}", letter.to_char())?;
        }
        Ok(())
    }
}

/// Evaluates words at a fixed pair `(x, y)`, with both inverses
/// precomputed so each letter application is one table lookup.
pub struct WordEvaluator {
    x: Permutation,
    y: Permutation,
    xinv: Permutation,
    yinv: Permutation,
}

impl WordEvaluator {
    pub fn new(x: Permutation, y: Permutation) -> Result<Self> {
        if x.degree() != y.degree() {
            return Err(Error::DegreeMismatch {
                left: x.degree(),
                right: y.degree(),
            });
        }
        let xinv = x.inverse();
        let yinv = y.inverse();
        Ok(Self { x, y, xinv, yinv })
    }

    pub fn degree(&self) -> usize {
        self.x.degree()
    }

    pub fn letter_image(&self, letter: Letter, point: usize) -> usize {
        match letter {
            Letter::X => self.x.apply(point),
            Letter::Y => self.y.apply(point),
            Letter::XInv => self.xinv.apply(point),
            Letter::YInv => self.yinv.apply(point),
        }
    }

    pub fn word_image(&self, word: &Word, point: usize) -> usize {
        word.letters()
            .iter()
            .fold(point, |p, &l| self.letter_image(l, p))
    }

    pub fn evaluate(&self, word: &Word) -> Permutation {
        let images = (0..self.degree())
            .map(|p| self.word_image(word, p))
            .collect();
        Permutation::new(images).expect("image of a bijection under bijections")
    }

    /// True iff the word evaluates to the identity; exits at the first
    /// moved point, which is the common case.
    pub fn fixes_all(&self, word: &Word) -> bool {
        (0..self.degree()).all(|p| self.word_image(word, p) == p)
    }
}

/// A two-sided positive word `u v^-1` with `u` and `v` distinct positive
/// words. `ell` is the combined length before any reduction; the stored
/// `reduced` form is the cyclic reduction of `u v^-1`, which is never
/// empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnimodalWord {
    u: Word,
    v: Word,
    reduced: Word,
    ell: usize,
}

impl UnimodalWord {
    pub fn new(u: Word, v: Word) -> Result<Self> {
        if !u.is_positive() || !v.is_positive() {
            return Err(Error::InvalidWord(
                "both halves must use only the positive letters x and y".into(),
            ));
        }
        if u == v {
            return Err(Error::InvalidWord(
                "halves are equal, so the word is trivially the identity".into(),
            ));
        }
        let ell = u.len() + v.len();
        let reduced = u.concat(&v.inverse()).cyclic_reduce();
        debug_assert!(!reduced.is_empty(), "u != v leaves a nonempty core");
        Ok(Self { u, v, reduced, ell })
    }

    pub fn parse(u_text: &str, v_text: &str) -> Result<Self> {
        Self::new(Word::parse(u_text)?, Word::parse(v_text)?)
    }

    pub fn u(&self) -> &Word {
        &self.u
    }

    pub fn v(&self) -> &Word {
        &self.v
    }

    pub fn reduced(&self) -> &Word {
        &self.reduced
    }

    /// Combined half length before reduction; every bound in the crate is
    /// stated in terms of this value, not the reduced length.
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// How many disjoint trajectories of the reduced word fit in degree
    /// `n`: `floor(n / 2ell)`.
    pub fn chain_capacity(&self, n: usize) -> usize {
        n / (2 * self.ell)
    }

    /// Compact `u=..;v=..` tag for reports.
    pub fn label(&self) -> String {
        format!("u={};v={}", self.u, self.v)
    }
}

impl fmt::Display for UnimodalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.reduced)
    }
}

/// All nonempty positive words of length at most `max_len`, shortest
/// first and lexicographic (`x` before `y`) within each length.
pub fn positive_words_up_to(max_len: usize) -> Result<Vec<Word>> {
    if max_len == 0 {
        return Err(Error::InvalidParameter(
            "maximum length must be at least 1".into(),
        ));
    }
    if max_len > 24 {
        return Err(Error::Capacity(format!(
            "2^{} positive words will not fit in memory",
            max_len + 1
        )));
    }
    let mut words = Vec::with_capacity(positive_word_count(max_len) as usize);
    for len in 1..=max_len {
        for code in 0u64..(1u64 << len) {
            let letters = (0..len)
                .map(|bit| {
                    if code >> (len - 1 - bit) & 1 == 0 {
                        Letter::X
                    } else {
                        Letter::Y
                    }
                })
                .collect();
            words.push(Word::from_letters(letters));
        }
    }
    Ok(words)
}

/// Number of nonempty positive words of length at most `max_len`:
/// `2^(max_len+1) - 2`.
pub fn positive_word_count(max_len: usize) -> u64 {
    assert!(max_len <= 62, "count overflows u64");
    (1u64 << (max_len + 1)) - 2
}

/// All two-sided positive words with `ell <= max_ell`, ordered by `ell`,
/// then by `u`, then by `v` (shorter words first, `x` before `y`).
pub fn enumerate_unimodal_words(max_ell: usize) -> Result<Vec<UnimodalWord>> {
    if max_ell == 0 {
        return Err(Error::InvalidParameter(
            "maximum combined length must be at least 1".into(),
        ));
    }
    if max_ell > 16 {
        return Err(Error::Capacity(format!(
            "roughly {}*4^{} two-sided words will not fit in memory",
            max_ell, max_ell
        )));
    }
    let mut halves_by_len: Vec<Vec<Word>> = vec![vec![Word::empty()]];
    for len in 1..=max_ell {
        halves_by_len.push(
            positive_words_up_to(len)?
                .into_iter()
                .filter(|w| w.len() == len)
                .collect(),
        );
    }
    let mut out = Vec::new();
    for ell in 1..=max_ell {
        for u_len in 0..=ell {
            let v_len = ell - u_len;
            for u in &halves_by_len[u_len] {
                for v in &halves_by_len[v_len] {
                    if u == v {
                        continue;
                    }
                    out.push(UnimodalWord::new(u.clone(), v.clone())?);
                }
            }
        }
    }
    Ok(out)
}

//! Permutations of `{0, ..., n-1}` stored as explicit image tables.
//!
//! Points are 0-based in the API. Both text formats (`[2,3,1]` and
//! `(1 2 3)`) are 1-based, matching how the objects are usually written
//! by hand.

use crate::error::{Error, Result};
use rand::RngExt;
use std::fmt;

/// A permutation of `{0, ..., degree-1}`: `images[i]` is where `i` goes.
///
/// Composition is left-to-right: `p.compose(&q)` applies `p` first, then
/// `q`. The minimum degree is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Validates that `images` is a bijection on `{0, ..., len-1}`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::InvalidPermutation(
                "degree must be at least 1".into(),
            ));
        }
        let mut seen = vec![false; n];
        for (i, &img) in images.iter().enumerate() {
            if img >= n {
                return Err(Error::InvalidPermutation(format!(
                    "image {} of point {} is out of range for degree {}",
                    img + 1,
                    i + 1,
                    n
                )));
            }
            if seen[img] {
                return Err(Error::InvalidPermutation(format!(
                    "image {} appears more than once",
                    img + 1
                )));
            }
            seen[img] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(degree: usize) -> Self {
        assert!(degree >= 1, "degree must be at least 1");
        Self {
            images: (0..degree).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of a single point. Panics if `point >= degree`.
    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i == img)
    }

    /// `self` first, then `other`: the result sends `i` to
    /// `other(self(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        let images = self.images.iter().map(|&i| other.images[i]).collect();
        Ok(Self { images })
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.degree()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img] = i;
        }
        Self { images }
    }

    /// Uniformly random permutation via the Fisher-Yates shuffle.
    /// Draws exactly `degree - 1` bounded samples. Panics if `degree == 0`.
    pub fn uniform_random<R: RngExt>(degree: usize, rng: &mut R) -> Self {
        assert!(degree >= 1, "degree must be at least 1");
        let mut images: Vec<usize> = (0..degree).collect();
        for i in (1..degree).rev() {
            let j = rng.random_range(0..=i);
            images.swap(i, j);
        }
        Self { images }
    }

    /// Nontrivial cycles, each starting at its smallest point, ordered by
    /// that point. Fixed points are omitted.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut visited = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if visited[start] || self.images[start] == start {
                visited[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            visited[start] = true;
            let mut point = self.images[start];
            while point != start {
                visited[point] = true;
                cycle.push(point);
                point = self.images[point];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let n = self.degree();
        let mut visited = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut point = start;
            while !visited[point] {
                visited[point] = true;
                len += 1;
                point = self.images[point];
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { lengths }
    }

    pub fn is_even(&self) -> bool {
        self.cycle_type().is_even()
    }

    /// Disjoint cycle notation, 1-based: `(1 2 3)(4 5)`. The identity
    /// renders as `()`.
    pub fn to_cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".into();
        }
        let mut out = String::new();
        for cycle in cycles {
            out.push('(');
            for (k, &point) in cycle.iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                out.push_str(&(point + 1).to_string());
            }
            out.push(')');
        }
        out
    }

    /// Parses either format. The image list `[2,3,1]` fixes the degree by
    /// its length; cycle notation infers the degree as the largest moved
    /// point, so `()` is rejected here (use [`Self::parse_with_degree`]).
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_impl(text, None)
    }

    /// Parses either format and pads or checks against an explicit degree.
    pub fn parse_with_degree(text: &str, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParameter(
                "degree must be at least 1".into(),
            ));
        }
        Self::parse_impl(text, Some(degree))
    }

    fn parse_impl(text: &str, degree: Option<usize>) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.starts_with('[') {
            Self::parse_image_list(trimmed, degree)
        } else if trimmed.starts_with('(') {
            Self::parse_cycles(trimmed, degree)
        } else {
            Err(Error::Parse(format!(
                "expected an image list like [2,3,1] or cycles like (1 2 3), got {trimmed:?}"
            )))
        }
    }

    fn parse_image_list(trimmed: &str, degree: Option<usize>) -> Result<Self> {
        let inner = trimmed
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse("unterminated image list".into()))?;
        let mut images = Vec::new();
        for part in inner.split(',') {
            let part = part.trim();
            let value: usize = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad image entry {part:?}")))?;
            if value == 0 {
                return Err(Error::Parse("points are 1-based, got 0".into()));
            }
            images.push(value - 1);
        }
        if let Some(d) = degree {
            if images.len() != d {
                return Err(Error::Parse(format!(
                    "image list has {} entries, expected degree {}",
                    images.len(),
                    d
                )));
            }
        }
        Self::new(images)
    }

    fn parse_cycles(trimmed: &str, degree: Option<usize>) -> Result<Self> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = trimmed;
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' at {rest:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| Error::Parse("unterminated cycle".into()))?;
            let mut cycle = Vec::new();
            for part in body[..close].split(|c: char| c.is_whitespace() || c == ',') {
                if part.is_empty() {
                    continue;
                }
                let value: usize = part
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad cycle point {part:?}")))?;
                if value == 0 {
                    return Err(Error::Parse("points are 1-based, got 0".into()));
                }
                cycle.push(value - 1);
            }
            if cycle.len() == 1 {
                return Err(Error::Parse(
                    "length-1 cycles are redundant; omit fixed points".into(),
                ));
            }
            cycles.push(cycle);
            rest = body[close + 1..].trim_start();
        }
        let max_point = cycles.iter().flatten().copied().max();
        let n = match (degree, max_point) {
            (Some(d), Some(m)) => {
                if m >= d {
                    return Err(Error::Parse(format!(
                        "cycle point {} exceeds degree {}",
                        m + 1,
                        d
                    )));
                }
                d
            }
            (Some(d), None) => d,
            (None, Some(m)) => m + 1,
            (None, None) => {
                return Err(Error::Parse(
                    "cannot infer degree of the identity; supply one explicitly".into(),
                ))
            }
        };
        let mut images: Vec<usize> = (0..n).collect();
        let mut moved = vec![false; n];
        for cycle in &cycles {
            for window in 0..cycle.len() {
                let from = cycle[window];
                let to = cycle[(window + 1) % cycle.len()];
                if moved[from] {
                    return Err(Error::Parse(format!(
                        "point {} appears in more than one cycle",
                        from + 1
                    )));
                }
                moved[from] = true;
                images[from] = to;
            }
        }
        Self::new(images)
    }
}

impl fmt::Display for Permutation {
    /// 1-based image list: `[2,3,1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, &img) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", img + 1)?;
        }
        write!(f, "]")
    }
}

/// Multiset of cycle lengths (fixed points included), sorted descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleType {
    lengths: Vec<usize>,
}

impl CycleType {
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn degree(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// A permutation is even iff degree minus the number of cycles is even.
    pub fn is_even(&self) -> bool {
        (self.degree() - self.lengths.len()).is_multiple_of(2)
    }
}

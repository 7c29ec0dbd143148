//! Structure of the group generated by a pair of permutations: orbits,
//! block systems, exact order via a stabilizer chain, and the five-way
//! classification used by the generation experiments.

use crate::error::{Error, Result};
use crate::perm::Permutation;
use num_bigint::BigUint;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::VecDeque;
use std::fmt;

/// Largest degree accepted by [`group_order`]; the stabilizer chain is
/// quadratic in memory and this keeps a typo from eating the machine.
pub const MAX_GROUP_ORDER_DEGREE: usize = 10_000;

pub fn factorial(n: usize) -> BigUint {
    let mut f = BigUint::from(1u32);
    for k in 2..=n {
        f *= BigUint::from(k);
    }
    f
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Roots in, new root out.
    fn union_roots(&mut self, a: usize, b: usize) -> usize {
        debug_assert!(self.parent[a] == a && self.parent[b] == b);
        let (big, small) = if self.size[a] >= self.size[b] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        big
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for p in 0..n {
            let r = self.find(p);
            by_root[r].push(p);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }
}

fn check_degrees(degree: usize, gens: &[Permutation]) -> Result<()> {
    if degree == 0 {
        return Err(Error::InvalidParameter(
            "degree must be at least 1".into(),
        ));
    }
    for g in gens {
        if g.degree() != degree {
            return Err(Error::DegreeMismatch {
                left: degree,
                right: g.degree(),
            });
        }
    }
    Ok(())
}

/// Orbits of `<gens>` on `{0, ..., degree-1}`: each orbit ascending,
/// orbits ordered by smallest point. No generators means all singletons.
pub fn orbits(degree: usize, gens: &[Permutation]) -> Result<Vec<Vec<usize>>> {
    check_degrees(degree, gens)?;
    let mut uf = UnionFind::new(degree);
    for g in gens {
        for p in 0..degree {
            let (a, b) = (uf.find(p), uf.find(g.apply(p)));
            if a != b {
                uf.union_roots(a, b);
            }
        }
    }
    Ok(uf.classes())
}

pub fn is_transitive(degree: usize, gens: &[Permutation]) -> Result<bool> {
    Ok(orbits(degree, gens)?.len() == 1)
}

/// A partition of the points preserved setwise by the group; witnesses
/// imprimitivity. Blocks all have the same size, strictly between 1 and
/// the degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSystem {
    blocks: Vec<Vec<usize>>,
}

impl BlockSystem {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

impl fmt::Display for BlockSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in &self.blocks {
            write!(f, "{{")?;
            for (i, p) in block.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Primitivity {
    Primitive,
    Imprimitive(BlockSystem),
}

/// Finest congruence of the (transitive) group identifying `a` and `b`:
/// merge the pair, then keep merging the generator images of merged
/// class representatives until stable.
fn minimal_congruence(
    degree: usize,
    gens: &[Permutation],
    a: usize,
    b: usize,
) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(degree);
    let mut queue = vec![(a, b)];
    while let Some((p, q)) = queue.pop() {
        let (rp, rq) = (uf.find(p), uf.find(q));
        if rp == rq {
            continue;
        }
        uf.union_roots(rp, rq);
        for g in gens {
            queue.push((g.apply(rp), g.apply(rq)));
        }
    }
    uf.classes()
}

/// Primitivity test for a transitive group; intransitive input is an
/// error because block systems are not defined there. Seeds the minimal
/// congruence with each pair (first point, other point); a nontrivial
/// congruence from any seed is returned as the witness.
pub fn primitivity(degree: usize, gens: &[Permutation]) -> Result<Primitivity> {
    check_degrees(degree, gens)?;
    if !is_transitive(degree, gens)? {
        return Err(Error::Intransitive(
            "primitivity is defined only for transitive groups".into(),
        ));
    }
    for b in 1..degree {
        let classes = minimal_congruence(degree, gens, 0, b);
        let size = classes[0].len();
        debug_assert!(classes.iter().all(|c| c.len() == size));
        if size < degree {
            debug_assert!(size > 1 && degree.is_multiple_of(size));
            return Ok(Primitivity::Imprimitive(BlockSystem { blocks: classes }));
        }
    }
    Ok(Primitivity::Primitive)
}

/// One level of the stabilizer chain: a base point, the indices of the
/// pool generators known to fix all earlier base points, and the orbit
/// of the base under them with one transversal element per point.
struct ChainLevel {
    base: usize,
    gen_ids: Vec<usize>,
    orbit: Vec<usize>,
    in_orbit: Vec<Option<usize>>,
    transversal: Vec<Permutation>,
    transversal_inv: Vec<Permutation>,
    /// Per orbit index: how many of `gen_ids` have been applied to it.
    expanded: Vec<usize>,
    /// Schreier pairs (orbit index, gen position) still to be sifted.
    pending: VecDeque<(usize, usize)>,
}

impl ChainLevel {
    fn new(degree: usize, base: usize) -> Self {
        let mut in_orbit = vec![None; degree];
        in_orbit[base] = Some(0);
        Self {
            base,
            gen_ids: Vec::new(),
            orbit: vec![base],
            in_orbit,
            transversal: vec![Permutation::identity(degree)],
            transversal_inv: vec![Permutation::identity(degree)],
            expanded: vec![0],
            pending: VecDeque::new(),
        }
    }
}

/// Deterministic Schreier-Sims. Every Schreier generator of every level
/// is sifted through the chain below it; residues are adjoined as new
/// strong generators (to every level whose base prefix they fix) and the
/// offending pair is re-sifted, so on return the chain condition holds
/// and the order is exact.
pub struct StabilizerChain {
    degree: usize,
    pool: Vec<Permutation>,
    levels: Vec<ChainLevel>,
}

impl StabilizerChain {
    pub fn new(degree: usize, gens: &[Permutation]) -> Result<Self> {
        check_degrees(degree, gens)?;
        let mut chain = Self {
            degree,
            pool: Vec::new(),
            levels: Vec::new(),
        };
        for g in gens {
            chain.insert_from(g.clone(), 0);
        }
        chain.process_pending();
        Ok(chain)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> BigUint {
        let mut o = BigUint::from(1u32);
        for level in &self.levels {
            o *= BigUint::from(level.orbit.len());
        }
        o
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: g.degree(),
            });
        }
        Ok(self.sift_from(g.clone(), 0).0.is_identity())
    }

    /// Strips `g` through levels `from..`, multiplying by transversal
    /// inverses. Returns the residue and the level it stopped at; a
    /// residue equal to the identity means full membership.
    fn sift_from(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for l in from..self.levels.len() {
            if g.is_identity() {
                return (g, l);
            }
            let level = &self.levels[l];
            let img = g.apply(level.base);
            match level.in_orbit[img] {
                None => return (g, l),
                Some(ti) => {
                    g = g
                        .compose(&level.transversal_inv[ti])
                        .expect("chain elements share one degree");
                }
            }
        }
        (g, self.levels.len())
    }

    /// Sifts `g` from `from` and, if a nontrivial residue remains,
    /// adjoins it to every level from `from` through the drop level
    /// (creating a deeper level when the residue fixes every existing
    /// base point). Returns whether anything changed.
    fn insert_from(&mut self, g: Permutation, from: usize) -> bool {
        let (residue, drop) = self.sift_from(g, from);
        if residue.is_identity() {
            return false;
        }
        if drop == self.levels.len() {
            let base = (0..self.degree)
                .find(|&p| residue.apply(p) != p)
                .expect("a non-identity permutation moves a point");
            self.levels.push(ChainLevel::new(self.degree, base));
        }
        let gen_id = self.pool.len();
        self.pool.push(residue);
        for l in from..=drop {
            self.levels[l].gen_ids.push(gen_id);
            Self::expand_level(&mut self.levels[l], &self.pool);
        }
        true
    }

    /// Closes the level's orbit under its current generators. Every
    /// (orbit point, generator) application happens exactly once over
    /// the lifetime of the level: it either discovers a new orbit point
    /// (with its transversal element) or queues a Schreier pair.
    fn expand_level(level: &mut ChainLevel, pool: &[Permutation]) {
        let mut oi = 0;
        while oi < level.orbit.len() {
            while level.expanded[oi] < level.gen_ids.len() {
                let gpos = level.expanded[oi];
                level.expanded[oi] += 1;
                let gen = &pool[level.gen_ids[gpos]];
                let img = gen.apply(level.orbit[oi]);
                if level.in_orbit[img].is_some() {
                    level.pending.push_back((oi, gpos));
                } else {
                    let tr = level.transversal[oi]
                        .compose(gen)
                        .expect("chain elements share one degree");
                    level.in_orbit[img] = Some(level.orbit.len());
                    level.orbit.push(img);
                    level.transversal_inv.push(tr.inverse());
                    level.transversal.push(tr);
                    level.expanded.push(0);
                }
            }
            oi += 1;
        }
    }

    /// Works pending Schreier pairs deepest level first. A pair whose
    /// Schreier generator does not sift to the identity grows the chain
    /// and is requeued; transversal entries are never replaced, so a
    /// pair verified once stays verified.
    fn process_pending(&mut self) {
        while let Some(l) = (0..self.levels.len())
            .rev()
            .find(|&l| !self.levels[l].pending.is_empty())
        {
            let (oi, gpos) = self.levels[l].pending.pop_front().unwrap();
            let schreier = {
                let level = &self.levels[l];
                let gen = &self.pool[level.gen_ids[gpos]];
                let img = gen.apply(level.orbit[oi]);
                let ti = level.in_orbit[img].expect("orbit is closed under generators");
                level.transversal[oi]
                    .compose(gen)
                    .and_then(|p| p.compose(&level.transversal_inv[ti]))
                    .expect("chain elements share one degree")
            };
            if !schreier.is_identity() && self.insert_from(schreier, l + 1) {
                self.levels[l].pending.push_back((oi, gpos));
            }
        }
    }
}

/// Exact order of `<gens>` (empty list generates the trivial group).
pub fn group_order(gens: &[Permutation]) -> Result<BigUint> {
    let Some(first) = gens.first() else {
        return Ok(BigUint::from(1u32));
    };
    let degree = first.degree();
    if degree > MAX_GROUP_ORDER_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree,
            max: MAX_GROUP_ORDER_DEGREE,
            context: "stabilizer chain memory is quadratic in the degree".into(),
        });
    }
    Ok(StabilizerChain::new(degree, gens)?.order())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "intransitive")]
    Intransitive,
    #[serde(rename = "transitive-imprimitive")]
    TransitiveImprimitive,
    #[serde(rename = "primitive-proper")]
    PrimitiveProper,
    #[serde(rename = "alternating")]
    Alternating,
    #[serde(rename = "symmetric")]
    Symmetric,
}

impl Verdict {
    pub const ALL: [Verdict; 5] = [
        Verdict::Intransitive,
        Verdict::TransitiveImprimitive,
        Verdict::PrimitiveProper,
        Verdict::Alternating,
        Verdict::Symmetric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Intransitive => "intransitive",
            Verdict::TransitiveImprimitive => "transitive-imprimitive",
            Verdict::PrimitiveProper => "primitive-proper",
            Verdict::Alternating => "alternating",
            Verdict::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerdictHistogram {
    pub intransitive: u64,
    #[serde(rename = "transitive-imprimitive")]
    pub transitive_imprimitive: u64,
    #[serde(rename = "primitive-proper")]
    pub primitive_proper: u64,
    pub alternating: u64,
    pub symmetric: u64,
}

impl VerdictHistogram {
    pub fn record(&mut self, verdict: Verdict) {
        *self.count_mut(verdict) += 1;
    }

    fn count_mut(&mut self, verdict: Verdict) -> &mut u64 {
        match verdict {
            Verdict::Intransitive => &mut self.intransitive,
            Verdict::TransitiveImprimitive => &mut self.transitive_imprimitive,
            Verdict::PrimitiveProper => &mut self.primitive_proper,
            Verdict::Alternating => &mut self.alternating,
            Verdict::Symmetric => &mut self.symmetric,
        }
    }

    pub fn count(&self, verdict: Verdict) -> u64 {
        match verdict {
            Verdict::Intransitive => self.intransitive,
            Verdict::TransitiveImprimitive => self.transitive_imprimitive,
            Verdict::PrimitiveProper => self.primitive_proper,
            Verdict::Alternating => self.alternating,
            Verdict::Symmetric => self.symmetric,
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.intransitive += other.intransitive;
        self.transitive_imprimitive += other.transitive_imprimitive;
        self.primitive_proper += other.primitive_proper;
        self.alternating += other.alternating;
        self.symmetric += other.symmetric;
    }

    pub fn total(&self) -> u64 {
        self.intransitive
            + self.transitive_imprimitive
            + self.primitive_proper
            + self.alternating
            + self.symmetric
    }

    /// Pairs whose group contains the full alternating group.
    pub fn at_least_alternating(&self) -> u64 {
        self.alternating + self.symmetric
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupClassification {
    pub degree: usize,
    pub transitive: bool,
    /// Primitivity is defined only for transitive groups.
    pub primitive: Option<bool>,
    /// Exact order; skipped by [`classify`] on the branches that do not
    /// need it for the verdict.
    pub order: Option<BigUint>,
    pub verdict: Verdict,
}

impl GroupClassification {
    pub fn contains_alternating(&self) -> bool {
        matches!(self.verdict, Verdict::Alternating | Verdict::Symmetric)
    }
}

const CYCLE_WALK_SEED: u64 = 0x517c_c1b7_2722_0a95;
const CYCLE_WALK_BUDGET: usize = 192;
const CYCLE_WALK_MIN_DEGREE: usize = 8;

fn is_prime(m: usize) -> bool {
    if m < 2 {
        return false;
    }
    if m.is_multiple_of(2) {
        return m == 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn has_witness_cycle(p: &Permutation, n: usize) -> bool {
    p.cycle_type()
        .lengths()
        .iter()
        .any(|&len| 2 * len > n && len <= n - 3 && is_prime(len))
}

/// Searches a short deterministic pseudo-random walk over `<x, y>` for
/// an element with a cycle of prime length p with n/2 < p <= n-3. Such
/// an element has exactly one p-cycle, and its power by the lcm of the
/// other cycle lengths is a p-cycle in the group; by Jordan's theorem a
/// primitive group containing a p-cycle with p <= n-3 prime contains the
/// alternating group. The walk is seeded by a fixed constant, so
/// classification stays a pure function of its inputs; a miss only means
/// falling back to the stabilizer chain.
fn prime_cycle_certificate(x: &Permutation, y: &Permutation) -> bool {
    let n = x.degree();
    if n < CYCLE_WALK_MIN_DEGREE {
        return false;
    }
    if has_witness_cycle(x, n) || has_witness_cycle(y, n) {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CYCLE_WALK_SEED);
    let mut c = x.clone();
    for _ in 0..CYCLE_WALK_BUDGET {
        let step = if rng.random_bool(0.5) { x } else { y };
        c = c.compose(step).expect("same degree");
        if has_witness_cycle(&c, n) {
            return true;
        }
    }
    false
}

/// Classifies `<x, y>`, computing the exact order only on the branches
/// whose verdict depends on it.
pub fn classify(x: &Permutation, y: &Permutation) -> Result<GroupClassification> {
    classify_impl(x, y, false)
}

/// Like [`classify`] but the order field is always filled in.
pub fn classify_with_order(x: &Permutation, y: &Permutation) -> Result<GroupClassification> {
    classify_impl(x, y, true)
}

fn classify_impl(x: &Permutation, y: &Permutation, want_order: bool) -> Result<GroupClassification> {
    if x.degree() != y.degree() {
        return Err(Error::DegreeMismatch {
            left: x.degree(),
            right: y.degree(),
        });
    }
    let n = x.degree();
    let gens = [x.clone(), y.clone()];

    // Degrees 1 and 2 are settled by the order alone: the only subgroups
    // are the trivial group (which IS the alternating group there) and,
    // at degree 2, the full symmetric group.
    if n <= 2 {
        let trivial = x.is_identity() && y.is_identity();
        let transitive = n == 1 || !trivial;
        let (order, verdict) = if trivial && n == 2 {
            (BigUint::from(1u32), Verdict::Alternating)
        } else {
            (factorial(n), Verdict::Symmetric)
        };
        return Ok(GroupClassification {
            degree: n,
            transitive,
            primitive: transitive.then_some(true),
            order: Some(order),
            verdict,
        });
    }

    if !is_transitive(n, &gens)? {
        return Ok(GroupClassification {
            degree: n,
            transitive: false,
            primitive: None,
            order: want_order.then(|| group_order(&gens)).transpose()?,
            verdict: Verdict::Intransitive,
        });
    }
    if let Primitivity::Imprimitive(_) = primitivity(n, &gens)? {
        return Ok(GroupClassification {
            degree: n,
            transitive: true,
            primitive: Some(false),
            order: want_order.then(|| group_order(&gens)).transpose()?,
            verdict: Verdict::TransitiveImprimitive,
        });
    }

    let full = factorial(n);
    let half = &full / BigUint::from(2u32);
    let (order, verdict) = if prime_cycle_certificate(x, y) {
        if x.is_even() && y.is_even() {
            (half, Verdict::Alternating)
        } else {
            (full, Verdict::Symmetric)
        }
    } else {
        let order = group_order(&gens)?;
        let verdict = if order == full {
            Verdict::Symmetric
        } else if order == half {
            debug_assert!(x.is_even() && y.is_even());
            Verdict::Alternating
        } else {
            Verdict::PrimitiveProper
        };
        (order, verdict)
    };
    Ok(GroupClassification {
        degree: n,
        transitive: true,
        primitive: Some(true),
        order: Some(order),
        verdict,
    })
}

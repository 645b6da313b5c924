use super::params::ConflictParams;
use crate::error::{Error, Result};
use crate::graph::Color;
use serde::{Deserialize, Serialize};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::path::{Path, PathBuf};

/// What a node knows before any communication: its initial color, its
/// residue-restricted list and its class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeType {
    pub init_color: u64,
    pub list: Vec<Color>,
    pub class: u32,
}

/// Default limit on candidate members examined while building one table.
pub const DEFAULT_TABLE_CAP: u64 = 20_000_000;

/// Per-type candidate families. Types are stored in greedy order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeTable {
    pub tau: u64,
    pub tau_prime: u64,
    pub g: u64,
    types: Vec<NodeType>,
    families: Vec<Vec<Vec<Color>>>,
    index: HashMap<NodeType, usize>,
}

/// Sizes used for one table: members of a class-`i` family have
/// `subset_size(i)` colors and a class-`i` family has `family_size(i)` members.
pub struct Shape<'a> {
    pub subset_size: &'a dyn Fn(u32) -> u64,
    pub family_size: &'a dyn Fn(u32) -> u64,
    pub order: Order,
}

/// How candidate members are enumerated for one type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Exhaustive: the lexicographically first admissible sequence of member
    /// indices, members in colex order. Exponential in the number of
    /// overlapping types.
    Colex,
    /// Pseudo-random members from a generator seeded by the type, each the
    /// first admissible draw; `attempts` draws per member before giving up.
    Sampled { attempts: u64 },
}

impl Default for Order {
    fn default() -> Self {
        Order::Sampled { attempts: 2_000 }
    }
}

fn type_seed(t: &NodeType) -> u64 {
    let mut h = Sha256::new();
    h.update(t.init_color.to_le_bytes());
    h.update(t.class.to_le_bytes());
    for x in &t.list {
        h.update(x.to_le_bytes());
    }
    u64::from_le_bytes(h.finalize()[..8].try_into().expect("digest has 32 bytes"))
}

/// Next k-subset of `0..n` in colex order, in place.
pub fn colex_next(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in 0..k {
        let limit = if i + 1 < k { c[i + 1] } else { n };
        if c[i] + 1 < limit {
            c[i] += 1;
            for (j, slot) in c.iter_mut().enumerate().take(i) {
                *slot = j;
            }
            return true;
        }
    }
    false
}

/// Greedy order: class, then list size, then initial color, then the list.
fn greedy_order(types: &[NodeType]) -> Vec<NodeType> {
    let mut t: Vec<NodeType> = types.to_vec();
    t.sort_by(|a, b| (a.class, a.list.len(), a.init_color, &a.list).cmp(&(b.class, b.list.len(), b.init_color, &b.list)));
    t.dedup();
    t
}

/// Subset of a node's list positions.
#[derive(Clone)]
struct Mask(Vec<u64>);

impl Mask {
    fn empty(len: usize) -> Self {
        Mask(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn overlap(&self, other: &Mask) -> u64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones() as u64).sum()
    }
}

/// Positions of `list` within distance `g` of some color of `set`. Both come
/// from residue-restricted lists, so every list color is near at most one
/// color of `set` and the proximity count of a candidate `C ⊆ list` with
/// `set` is the overlap of `C` with this mask.
fn near_mask(list: &[Color], set: &[Color], g: u64) -> Mask {
    let mut m = Mask::empty(list.len());
    let mut j = 0;
    for (i, &x) in list.iter().enumerate() {
        while j < set.len() && set[j] + g < x {
            j += 1;
        }
        if j < set.len() && set[j] <= x + g {
            m.set(i);
        }
    }
    m
}

struct Competitor {
    members: Vec<Mask>,
    same_class: bool,
}

struct Search {
    len: usize,
    k: usize,
    k_prime: usize,
    tau: u64,
    tau_prime: u64,
    competitors: Vec<Competitor>,
    examined: u64,
    cap: u64,
}

struct Partial {
    chosen: Vec<Vec<usize>>,
    fwd: Vec<u64>,
    rev: Vec<Vec<bool>>,
    rev_count: Vec<u64>,
}

/// Effect of adding one member: competitors it hits, and newly hit members
/// of same-class competitors.
struct Hits {
    fwd: Vec<usize>,
    rev: Vec<(usize, usize)>,
}

impl Search {
    fn partial(&self) -> Partial {
        Partial {
            chosen: Vec::with_capacity(self.k_prime.min(1024)),
            fwd: vec![0; self.competitors.len()],
            rev: self.competitors.iter().map(|c| if c.same_class { vec![false; c.members.len()] } else { Vec::new() }).collect(),
            rev_count: vec![0; self.competitors.len()],
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.examined += 1;
        if self.examined > self.cap {
            return Err(Error::CapExceeded { what: "type table enumeration".into(), cap: self.cap });
        }
        Ok(())
    }

    /// A candidate is admissible while every earlier family is hit by fewer
    /// than `τ′` chosen members and, for same-class families, fewer than
    /// `τ′` of their members are hit by the chosen ones.
    fn admit(&self, cursor: &[usize], p: &Partial) -> Option<Hits> {
        let mut cand = Mask::empty(self.len);
        for &i in cursor {
            cand.set(i);
        }
        let mut hits = Hits { fwd: Vec::new(), rev: Vec::new() };
        for (j, comp) in self.competitors.iter().enumerate() {
            let mut hit_any = false;
            let mut extra = 0;
            for (mi, m) in comp.members.iter().enumerate() {
                if cand.overlap(m) >= self.tau {
                    hit_any = true;
                    if !comp.same_class {
                        break;
                    }
                    if !p.rev[j][mi] {
                        hits.rev.push((j, mi));
                        extra += 1;
                    }
                }
            }
            if hit_any {
                if p.fwd[j] + 1 >= self.tau_prime {
                    return None;
                }
                hits.fwd.push(j);
            }
            if comp.same_class && p.rev_count[j] + extra >= self.tau_prime {
                return None;
            }
        }
        Some(hits)
    }

    fn commit(p: &mut Partial, cursor: &[usize], hits: &Hits) {
        for &j in &hits.fwd {
            p.fwd[j] += 1;
        }
        for &(j, mi) in &hits.rev {
            p.rev[j][mi] = true;
            p.rev_count[j] += 1;
        }
        p.chosen.push(cursor.to_vec());
    }

    fn rollback(p: &mut Partial, hits: &Hits) {
        p.chosen.pop();
        for &j in &hits.fwd {
            p.fwd[j] -= 1;
        }
        for &(j, mi) in &hits.rev {
            p.rev[j][mi] = false;
            p.rev_count[j] -= 1;
        }
    }

    /// Lexicographically first admissible sequence of members in colex order.
    fn colex(&mut self) -> Result<Option<Vec<Vec<usize>>>> {
        let mut p = self.partial();
        let start: Vec<usize> = (0..self.k).collect();
        Ok(self.dfs(start, &mut p)?.then_some(p.chosen))
    }

    fn dfs(&mut self, mut cursor: Vec<usize>, p: &mut Partial) -> Result<bool> {
        if p.chosen.len() == self.k_prime {
            return Ok(true);
        }
        loop {
            self.tick()?;
            if let Some(hits) = self.admit(&cursor, p) {
                Self::commit(p, &cursor, &hits);
                let mut next = cursor.clone();
                if (colex_next(&mut next, self.len) || p.chosen.len() == self.k_prime) && self.dfs(next, p)? {
                    return Ok(true);
                }
                Self::rollback(p, &hits);
            }
            if !colex_next(&mut cursor, self.len) {
                return Ok(false);
            }
        }
    }

    /// For each list position, the competitor members whose mask holds it.
    fn cover(&self) -> Vec<Vec<usize>> {
        let mut cover = vec![Vec::new(); self.len];
        let mut id = 0;
        for comp in &self.competitors {
            for m in &comp.members {
                for (w, &word) in m.0.iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        cover[w * 64 + bits.trailing_zeros() as usize].push(id);
                        bits &= bits - 1;
                    }
                }
                id += 1;
            }
        }
        cover
    }

    /// Walks a random permutation of positions and keeps each one that
    /// leaves every competitor member below `τ` overlap. `None` if fewer
    /// than `k` positions survive.
    fn constructive_draw(&self, rng: &mut ChaCha8Rng, cover: &[Vec<usize>], masks: usize) -> Option<Vec<usize>> {
        let mut perm: Vec<usize> = (0..self.len).collect();
        perm.shuffle(rng);
        let mut load = vec![0u64; masks];
        let mut cursor = Vec::with_capacity(self.k);
        for p in perm {
            if cover[p].iter().all(|&m| load[m] + 1 < self.tau) {
                cover[p].iter().for_each(|&m| load[m] += 1);
                cursor.push(p);
                if cursor.len() == self.k {
                    cursor.sort_unstable();
                    return Some(cursor);
                }
            }
        }
        None
    }

    /// Members drawn one at a time from a generator seeded by the type;
    /// each is the first admissible draw. Draws alternate between a
    /// constructive draw that avoids every competitor member and a uniform
    /// draw. Gives up after `attempts` draws for a single member.
    fn sampled(&mut self, seed: u64, attempts: u64) -> Result<Option<Vec<Vec<usize>>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cover = self.cover();
        let masks = self.competitors.iter().map(|c| c.members.len()).sum();
        let mut p = self.partial();
        while p.chosen.len() < self.k_prime {
            let mut placed = false;
            for attempt in 0..attempts {
                self.tick()?;
                let drawn = if attempt % 2 == 0 { self.constructive_draw(&mut rng, &cover, masks) } else { None };
                let cursor = drawn.unwrap_or_else(|| {
                    let mut c = rand::seq::index::sample(&mut rng, self.len, self.k).into_vec();
                    c.sort_unstable();
                    c
                });
                if p.chosen.contains(&cursor) {
                    continue;
                }
                if let Some(hits) = self.admit(&cursor, &p) {
                    Self::commit(&mut p, &cursor, &hits);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Ok(None);
            }
        }
        Ok(Some(p.chosen))
    }
}

fn lists_interact(a: &[Color], b: &[Color], g: u64) -> bool {
    super::predicates::proximity_count(a, b, g) > 0
}

/// Greedily assigns each type the first conflict-free family.
///
/// Families are searched depth-first over members in colex order, so each
/// type receives the lexicographically smallest feasible sequence of member
/// indices. A candidate is rejected if it would give `τ′` members hitting an
/// earlier family, or, for an earlier family of the same class, `τ′` of
/// that family's members hitting the candidate family.
pub fn build_type_table(params: &ConflictParams, types: &[NodeType], shape: &Shape<'_>, cap: u64) -> Result<TypeTable> {
    let (tau, tau_prime, g) = (params.tau, params.tau_prime, params.g);
    let ordered = greedy_order(types);
    let mut families: Vec<Vec<Vec<Color>>> = Vec::with_capacity(ordered.len());
    let mut examined = 0u64;
    for (i, t) in ordered.iter().enumerate() {
        let modulus = 2 * g + 1;
        if t.list.windows(2).any(|w| w[0] >= w[1]) || t.list.iter().any(|x| x % modulus != t.list[0] % modulus) {
            return Err(Error::InvalidInstance(format!("type {i}: list must be sorted and within one residue class")));
        }
        let k = (shape.subset_size)(t.class) as usize;
        let k_prime = (shape.family_size)(t.class) as usize;
        if k == 0 || k > t.list.len() || k_prime == 0 {
            return Err(Error::GreedyExhausted { type_index: i });
        }
        if k_prime as u64 > cap {
            return Err(Error::CapExceeded { what: format!("family of {k_prime} members"), cap });
        }
        let competitors = ordered[..i]
            .iter()
            .zip(&families)
            .filter(|(u, _)| lists_interact(&u.list, &t.list, g))
            .map(|(u, f)| Competitor {
                members: f.iter().map(|c| near_mask(&t.list, c, g)).collect(),
                same_class: u.class == t.class,
            })
            .collect();
        let mut search = Search { len: t.list.len(), k, k_prime, tau, tau_prime, competitors, examined, cap };
        let found = match shape.order {
            Order::Colex => search.colex()?,
            Order::Sampled { attempts } => search.sampled(type_seed(t), attempts)?,
        };
        examined = search.examined;
        match found {
            None => {
                if let Order::Sampled { attempts } = shape.order {
                    return Err(Error::CapExceeded { what: format!("draws per member for type {i}"), cap: attempts });
                }
                return Err(Error::GreedyExhausted { type_index: i });
            }
            Some(f) => families.push(f.iter().map(|idx| idx.iter().map(|&p| t.list[p]).collect()).collect()),
        }
    }
    let index = ordered.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    Ok(TypeTable { tau, tau_prime, g, types: ordered, families, index })
}

const MAGIC: &[u8; 4] = b"LDTT";
const VERSION: u32 = 1;

struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.0.len() < N {
            return Err(Error::InvariantViolated("truncated type table".into()));
        }
        let (h, t) = self.0.split_at(N);
        self.0 = t;
        Ok(h.try_into().expect("length checked"))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn colors(&mut self) -> Result<Vec<Color>> {
        let n = self.u32()? as usize;
        (0..n).map(|_| self.u64()).collect()
    }
}

fn put_colors(out: &mut Vec<u8>, c: &[Color]) {
    out.extend_from_slice(&(c.len() as u32).to_le_bytes());
    for x in c {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

impl TypeTable {
    pub fn types(&self) -> &[NodeType] {
        &self.types
    }

    pub fn families(&self) -> &[Vec<Vec<Color>>] {
        &self.families
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn index_of(&self, t: &NodeType) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn family_of(&self, t: &NodeType) -> Option<&[Vec<Color>]> {
        self.index.get(t).map(|&i| self.families[i].as_slice())
    }

    /// Ordered pairs `(i, j)` with `class(j) ≤ class(i)` whose families
    /// conflict. Empty for a valid table.
    pub fn violations(&self) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for i in 0..self.types.len() {
            for j in 0..self.types.len() {
                if i != j
                    && self.types[j].class <= self.types[i].class
                    && super::predicates::psi_g_member(&self.families[i], &self.families[j], self.tau_prime, self.tau, self.g)
                {
                    bad.push((i, j));
                }
            }
        }
        bad
    }

    /// Deterministic little-endian encoding.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for v in [self.tau, self.tau_prime, self.g] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&(self.types.len() as u32).to_le_bytes());
        for (t, f) in self.types.iter().zip(&self.families) {
            out.extend_from_slice(&t.init_color.to_le_bytes());
            out.extend_from_slice(&t.class.to_le_bytes());
            put_colors(&mut out, &t.list);
            out.extend_from_slice(&(f.len() as u32).to_le_bytes());
            for c in f {
                put_colors(&mut out, c);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader(bytes);
        if &r.take::<4>()? != MAGIC || r.u32()? != VERSION {
            return Err(Error::InvariantViolated("not a type table".into()));
        }
        let (tau, tau_prime, g) = (r.u64()?, r.u64()?, r.u64()?);
        let n = r.u32()? as usize;
        let mut types = Vec::with_capacity(n);
        let mut families = Vec::with_capacity(n);
        for _ in 0..n {
            let init_color = r.u64()?;
            let class = r.u32()?;
            let list = r.colors()?;
            let members = r.u32()? as usize;
            let f = (0..members).map(|_| r.colors()).collect::<Result<Vec<_>>>()?;
            types.push(NodeType { init_color, list, class });
            families.push(f);
        }
        if !r.0.is_empty() {
            return Err(Error::InvariantViolated("trailing bytes in type table".into()));
        }
        let index = types.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        Ok(TypeTable { tau, tau_prime, g, types, families, index })
    }
}

/// Hex SHA-256 over the parameters, the realized sizes and the sorted
/// distinct types.
pub fn cache_key(params: &ConflictParams, types: &[NodeType], shape: &Shape<'_>) -> String {
    let mut h = Sha256::new();
    for v in [params.tau, params.tau_prime, params.g] {
        h.update(v.to_le_bytes());
    }
    for t in greedy_order(types) {
        h.update(t.init_color.to_le_bytes());
        h.update(t.class.to_le_bytes());
        h.update((shape.subset_size)(t.class).to_le_bytes());
        h.update((shape.family_size)(t.class).to_le_bytes());
        h.update(match shape.order {
            Order::Colex => u64::MAX,
            Order::Sampled { attempts } => attempts,
        }.to_le_bytes());
        let mut buf = Vec::new();
        put_colors(&mut buf, &t.list);
        h.update(&buf);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// On-disk table cache; the directory comes from `LISTDEFECT_CACHE`.
#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os("LISTDEFECT_CACHE").map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Loads the table for this key or builds and stores it. A corrupt or
    /// mismatching file is rebuilt.
    pub fn get_or_build(&self, params: &ConflictParams, types: &[NodeType], shape: &Shape<'_>, cap: u64) -> Result<TypeTable> {
        let path = self.dir.join(format!("{}.ldtt", cache_key(params, types, shape)));
        if let Ok(bytes) = std::fs::read(&path) {
            if let Ok(t) = TypeTable::from_bytes(&bytes) {
                if t.types == greedy_order(types) {
                    return Ok(t);
                }
            }
        }
        let t = build_type_table(params, types, shape, cap)?;
        std::fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, t.to_bytes())?;
        std::fs::rename(&tmp, &path)?;
        Ok(t)
    }
}

/// Builds through the environment cache when one is configured.
pub fn build_cached(params: &ConflictParams, types: &[NodeType], shape: &Shape<'_>, cap: u64) -> Result<TypeTable> {
    match TableCache::from_env() {
        Some(c) => c.get_or_build(params, types, shape, cap),
        None => build_type_table(params, types, shape, cap),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shape_const(k: u64, kp: u64) -> (impl Fn(u32) -> u64, impl Fn(u32) -> u64) {
        (move |_| k, move |_| kp)
    }

    fn params(tau: u64, tau_prime: u64, g: u64) -> ConflictParams {
        ConflictParams::scaled(1, 64, 8, g, tau, tau_prime).unwrap()
    }

    #[test]
    fn colex_order_of_pairs() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while colex_next(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]);
        let mut e: Vec<usize> = vec![];
        assert!(!colex_next(&mut e, 3));
    }

    #[test]
    fn single_type_gets_first_family() {
        let (s, f) = shape_const(2, 2);
        let shape = Shape { subset_size: &s, family_size: &f, order: Order::Colex };
        let t = NodeType { init_color: 0, list: vec![1, 2, 3, 4], class: 1 };
        let table = build_type_table(&params(2, 2, 0), std::slice::from_ref(&t), &shape, 1000).unwrap();
        assert_eq!(table.family_of(&t).unwrap(), &[vec![1, 2], vec![1, 3]]);
    }

    #[test]
    fn disjoint_lists_do_not_interact() {
        let (s, f) = shape_const(2, 2);
        let shape = Shape { subset_size: &s, family_size: &f, order: Order::Colex };
        let a = NodeType { init_color: 0, list: vec![1, 2, 3], class: 1 };
        let b = NodeType { init_color: 1, list: vec![10, 11, 12], class: 1 };
        let table = build_type_table(&params(1, 1, 0), &[b, a], &shape, 1000).unwrap();
        assert_eq!(table.types()[0].init_color, 0);
        assert!(table.violations().is_empty());
        assert_eq!(table.families()[1], vec![vec![10, 11], vec![10, 12]]);
    }

    #[test]
    fn two_element_lists_cannot_hold_two_pairs() {
        let (s, f) = shape_const(2, 2);
        let shape = Shape { subset_size: &s, family_size: &f, order: Order::Colex };
        let t = NodeType { init_color: 0, list: vec![1, 2], class: 1 };
        assert!(matches!(build_type_table(&params(2, 2, 0), &[t], &shape, 1000), Err(Error::GreedyExhausted { type_index: 0 })));
    }

    #[test]
    fn same_list_types_get_separated_families() {
        let (s, f) = shape_const(1, 2);
        let shape = Shape { subset_size: &s, family_size: &f, order: Order::Colex };
        let types: Vec<NodeType> = (0..3).map(|c| NodeType { init_color: c, list: vec![0, 1, 2, 3, 4, 5], class: 1 }).collect();
        let table = build_type_table(&params(1, 1, 0), &types, &shape, 10_000).unwrap();
        assert!(table.violations().is_empty());
        assert_eq!(table.families()[0], vec![vec![0], vec![1]]);
        assert_eq!(table.families()[1], vec![vec![2], vec![3]]);
    }

    #[test]
    fn cap_is_enforced() {
        let (s, f) = shape_const(1, 2);
        let shape = Shape { subset_size: &s, family_size: &f, order: Order::Colex };
        let types: Vec<NodeType> = (0..4).map(|c| NodeType { init_color: c, list: vec![0, 1, 2, 3, 4, 5], class: 1 }).collect();
        assert!(matches!(build_type_table(&params(1, 1, 0), &types, &shape, 5), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn bytes_round_trip_and_cache() {
        let (s, f) = shape_const(2, 2);
        let shape = Shape { subset_size: &s, family_size: &f, order: Order::Colex };
        let types: Vec<NodeType> =
            (0..3).map(|c| NodeType { init_color: c, list: vec![0, 3, 6, 9, 12], class: 1 + (c as u32 % 2) }).collect();
        let p = params(2, 2, 1);
        let table = build_type_table(&p, &types, &shape, 100_000).unwrap();
        let bytes = table.to_bytes();
        assert_eq!(TypeTable::from_bytes(&bytes).unwrap(), table);
        assert_eq!(build_type_table(&p, &types, &shape, 100_000).unwrap().to_bytes(), bytes);
        assert!(TypeTable::from_bytes(&bytes[..bytes.len() - 1]).is_err());

        let dir = std::env::temp_dir().join(format!("ldtt-test-{}", std::process::id()));
        let cache = TableCache::new(&dir);
        let first = cache.get_or_build(&p, &types, &shape, 100_000).unwrap();
        let second = cache.get_or_build(&p, &types, &shape, 0).unwrap();
        assert_eq!(first, second);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn sampled_order_is_deterministic_and_valid() {
        let (s, f) = shape_const(4, 4);
        let shape = Shape { subset_size: &s, family_size: &f, order: Order::default() };
        let types: Vec<NodeType> = (0..12).map(|c| NodeType { init_color: c, list: (0..40).collect(), class: 1 }).collect();
        let p = params(2, 2, 0);
        let a = build_type_table(&p, &types, &shape, 1_000_000).unwrap();
        assert!(a.violations().is_empty());
        assert_eq!(a.to_bytes(), build_type_table(&p, &types, &shape, 1_000_000).unwrap().to_bytes());
        let tight = Shape { order: Order::Sampled { attempts: 1 }, ..shape };
        let crowded: Vec<NodeType> = (0..6).map(|c| NodeType { init_color: c, list: (0..5).collect(), class: 1 }).collect();
        assert!(matches!(build_type_table(&p, &crowded, &tight, 1_000_000), Err(Error::CapExceeded { .. })));
    }

    fn type_strategy() -> impl Strategy<Value = NodeType> {
        (0u64..6, proptest::collection::btree_set(0u64..8, 4..7), 1u32..3)
            .prop_map(|(init_color, l, class)| NodeType { init_color, list: l.into_iter().collect(), class })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn built_tables_have_no_conflicts(types in proptest::collection::vec(type_strategy(), 1..5)) {
            let (s, f) = shape_const(2, 2);
            let shape = Shape { subset_size: &s, family_size: &f, order: Order::Colex };
            match build_type_table(&params(2, 2, 0), &types, &shape, 1_000_000) {
                Ok(t) => prop_assert!(t.violations().is_empty()),
                Err(e) => { let exhausted = matches!(e, Error::GreedyExhausted { .. }); prop_assert!(exhausted); }
            }
        }
    }
}

//! Finite groups as Cayley tables, with the subgroup, transfer and
//! bicharacter machinery used by the λ classifier and the Heisenberg layer.
//!
//! Element `0` is always the identity. Subgroups are sorted id lists.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith;
use crate::cyclo::RootOfUnity;

pub const MAX_GROUP_ORDER: usize = 4096;
const FULL_AXIOM_CHECK: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generators do not close within {0} elements")]
    NotClosed(usize),
    #[error("group order {0} exceeds the supported maximum")]
    TooLarge(usize),
    #[error("group axiom violated: {0}")]
    AxiomViolation(String),
    #[error("not a subgroup")]
    NotSubgroup,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("group is not abelian")]
    NotAbelian,
    #[error("bicharacter is degenerate; radical {0:?}")]
    Degenerate(Vec<usize>),
    #[error("not an alternating bicharacter: {0}")]
    NotAlternating(String),
    #[error("cannot parse group spec: {0}")]
    Parse(String),
    #[error("group is not two-step nilpotent")]
    NotTwoStepNilpotent,
}

pub type Subgroup = Vec<usize>;

#[derive(Clone)]
pub struct FiniteGroup {
    name: String,
    n: usize,
    table: Vec<u16>,
    inv: Vec<u16>,
    labels: Vec<String>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.n)
    }
}

impl FiniteGroup {
    /// Closure of `gens` under `mul`, numbered in breadth-first order.
    pub fn from_closure<T: Clone + Eq + Hash>(
        name: impl Into<String>,
        identity: T,
        gens: &[T],
        mul: impl Fn(&T, &T) -> T,
        label: impl Fn(&T) -> String,
    ) -> Result<Self, GroupError> {
        let mut elems = vec![identity.clone()];
        let mut index: HashMap<T, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let x = mul(&elems[i], g);
                if !index.contains_key(&x) {
                    if elems.len() == MAX_GROUP_ORDER {
                        return Err(GroupError::NotClosed(MAX_GROUP_ORDER));
                    }
                    index.insert(x.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(x);
                }
            }
        }
        let n = elems.len();
        let mut table = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                let x = mul(&elems[i], &elems[j]);
                table[i * n + j] = *index.get(&x).ok_or(GroupError::NotClosed(n))? as u16;
            }
        }
        let labels = elems.iter().map(label).collect();
        Self::assemble(name.into(), n, table, labels)
    }

    /// Builds a group from an explicit table; row `i`, column `j` holds `i·j`.
    pub fn from_cayley(name: impl Into<String>, rows: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::AxiomViolation("empty table".into()));
        }
        if n > MAX_GROUP_ORDER {
            return Err(GroupError::TooLarge(n));
        }
        let mut table = Vec::with_capacity(n * n);
        for r in &rows {
            if r.len() != n || r.iter().any(|&x| x >= n) {
                return Err(GroupError::AxiomViolation("table is not square over 0..n".into()));
            }
            table.extend(r.iter().map(|&x| x as u16));
        }
        let g = Self::assemble(name.into(), n, table, (0..n).map(|i| i.to_string()).collect())?;
        g.check_axioms()?;
        Ok(g)
    }

    fn assemble(name: String, n: usize, table: Vec<u16>, labels: Vec<String>) -> Result<Self, GroupError> {
        if n > MAX_GROUP_ORDER {
            return Err(GroupError::TooLarge(n));
        }
        let mut inv = vec![u16::MAX; n];
        for i in 0..n {
            for j in 0..n {
                if table[i * n + j] == 0 {
                    inv[i] = j as u16;
                    break;
                }
            }
        }
        if inv.contains(&u16::MAX) {
            return Err(GroupError::AxiomViolation("element without inverse".into()));
        }
        Ok(FiniteGroup { name, n, table, inv, labels })
    }

    fn check_axioms(&self) -> Result<(), GroupError> {
        let n = self.n;
        for i in 0..n {
            if self.mul(0, i) != i || self.mul(i, 0) != i {
                return Err(GroupError::AxiomViolation("element 0 is not the identity".into()));
            }
            if self.mul(self.inv(i), i) != 0 {
                return Err(GroupError::AxiomViolation(format!("left inverse of {i}")));
            }
        }
        let assoc = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= FULL_AXIOM_CHECK {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(GroupError::AxiomViolation(format!("({a}{b}){c} ≠ {a}({b}{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..FULL_AXIOM_CHECK.pow(3) {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !assoc(a, b, c) {
                    return Err(GroupError::AxiomViolation(format!("({a}{b}){c} ≠ {a}({b}{c})")));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut e = k.unsigned_abs();
        let (mut r, mut b) = (0, base);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// `[x, y] = x⁻¹y⁻¹xy`.
    pub fn commutator(&self, x: usize, y: usize) -> usize {
        let a = self.mul(self.inv(x), self.inv(y));
        self.mul(a, self.mul(x, y))
    }

    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let (mut k, mut x) = (1, a);
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        self.elements().fold(1, |acc, x| arith::lcm(acc as u64, self.element_order(x) as u64) as usize)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (a + 1..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Subgroup generated by `gens`.
    pub fn generate(&self, gens: &[usize]) -> Subgroup {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut out = vec![0];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    pub fn is_subgroup(&self, h: &[usize]) -> bool {
        let mut mask = vec![false; self.n];
        h.iter().for_each(|&x| mask[x] = true);
        !h.is_empty() && mask[0] && h.iter().all(|&a| h.iter().all(|&b| mask[self.mul(a, self.inv(b))]))
    }

    pub fn is_normal(&self, h: &[usize]) -> bool {
        let mut mask = vec![false; self.n];
        h.iter().for_each(|&x| mask[x] = true);
        self.elements().all(|g| h.iter().all(|&x| mask[self.conj(g, x)]))
    }

    pub fn center(&self) -> Subgroup {
        self.elements().filter(|&z| self.elements().all(|g| self.mul(z, g) == self.mul(g, z))).collect()
    }

    pub fn centralizer(&self, s: &[usize]) -> Subgroup {
        self.elements().filter(|&g| s.iter().all(|&x| self.mul(g, x) == self.mul(x, g))).collect()
    }

    pub fn normalizer(&self, h: &[usize]) -> Subgroup {
        let mut mask = vec![false; self.n];
        h.iter().for_each(|&x| mask[x] = true);
        self.elements().filter(|&g| h.iter().all(|&x| mask[self.conj(g, x)])).collect()
    }

    /// Subgroup generated by all `[x, y]` with `x ∈ a`, `y ∈ b`.
    pub fn commutator_of(&self, a: &[usize], b: &[usize]) -> Subgroup {
        let mut gens: Vec<usize> = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| self.commutator(x, y)).collect();
        gens.sort_unstable();
        gens.dedup();
        self.generate(&gens)
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let all: Vec<usize> = self.elements().collect();
        self.commutator_of(&all, &all)
    }

    pub fn is_two_step_nilpotent(&self) -> bool {
        let d = self.derived_subgroup();
        let z = self.center();
        d.iter().all(|x| z.binary_search(x).is_ok())
    }

    pub fn derived_data(&self) -> DerivedData {
        let commutator = self.derived_subgroup();
        let center = self.center();
        let two = commutator.iter().all(|x| center.binary_search(x).is_ok());
        DerivedData { is_abelian: commutator.len() == 1, commutator, center, is_two_step_nilpotent: two }
    }

    /// Left cosets `gH`, each sorted, listed by least element.
    pub fn left_cosets(&self, h: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for g in self.elements() {
            if seen[g] {
                continue;
            }
            let mut c: Vec<usize> = h.iter().map(|&x| self.mul(g, x)).collect();
            c.sort_unstable();
            c.iter().for_each(|&x| seen[x] = true);
            out.push(c);
        }
        out
    }

    /// Least-id representatives of the left cosets of `h`.
    pub fn left_transversal(&self, h: &[usize]) -> Vec<usize> {
        self.left_cosets(h).into_iter().map(|c| c[0]).collect()
    }

    /// `G/N` with the projection; cosets are numbered by least element.
    pub fn quotient(&self, normal: &[usize]) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
        if !self.is_subgroup(normal) {
            return Err(GroupError::NotSubgroup);
        }
        if !self.is_normal(normal) {
            return Err(GroupError::NotNormal);
        }
        let cosets = self.left_cosets(normal);
        let mut proj = vec![0; self.n];
        for (i, c) in cosets.iter().enumerate() {
            c.iter().for_each(|&x| proj[x] = i);
        }
        let m = cosets.len();
        let mut table = vec![0u16; m * m];
        for i in 0..m {
            for j in 0..m {
                table[i * m + j] = proj[self.mul(cosets[i][0], cosets[j][0])] as u16;
            }
        }
        let labels = cosets.iter().map(|c| format!("{}N", self.labels[c[0]])).collect();
        Ok((Self::assemble(format!("{}/N", self.name), m, table, labels)?, proj))
    }

    /// The subgroup `h` as a group in its own right, with the inclusion map.
    pub fn subgroup_group(&self, h: &[usize]) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
        if !self.is_subgroup(h) {
            return Err(GroupError::NotSubgroup);
        }
        let pos: HashMap<usize, usize> = h.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let m = h.len();
        let mut table = vec![0u16; m * m];
        for i in 0..m {
            for j in 0..m {
                table[i * m + j] = pos[&self.mul(h[i], h[j])] as u16;
            }
        }
        let labels = h.iter().map(|&x| self.labels[x].clone()).collect();
        Ok((Self::assemble(format!("<{}>", self.name), m, table, labels)?, h.to_vec()))
    }

    /// Every subgroup, as sorted id lists in increasing size.
    pub fn all_subgroups(&self) -> Vec<Subgroup> {
        let mut found: Vec<Subgroup> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let cyclic: Vec<Subgroup> = {
            let mut c: Vec<Subgroup> = self.elements().map(|x| self.generate(&[x])).collect();
            c.sort();
            c.dedup();
            c
        };
        for c in &cyclic {
            if seen.insert(c.clone()) {
                found.push(c.clone());
            }
        }
        let mut i = 0;
        while i < found.len() {
            for c in &cyclic {
                let cur = &found[i];
                if c.iter().all(|x| cur.binary_search(x).is_ok()) {
                    continue;
                }
                let mut gens = cur.clone();
                gens.extend_from_slice(c);
                let s = self.generate(&gens);
                if seen.insert(s.clone()) {
                    found.push(s);
                }
            }
            i += 1;
        }
        found.sort_by_key(|s| (s.len(), s.clone()));
        found
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedData {
    pub commutator: Subgroup,
    pub center: Subgroup,
    pub is_two_step_nilpotent: bool,
    pub is_abelian: bool,
}

// ---------------------------------------------------------------- named groups

pub fn cyclic(n: usize) -> Result<FiniteGroup, GroupError> {
    abelian(&[n]).map(|mut g| {
        g.name = format!("C{n}");
        g
    })
}

/// `Z/n_1 × … × Z/n_k`.
pub fn abelian(factors: &[usize]) -> Result<FiniteGroup, GroupError> {
    let k = factors.len();
    let gens: Vec<Vec<usize>> = (0..k).map(|i| (0..k).map(|j| usize::from(i == j)).collect()).collect();
    let name = factors.iter().map(|n| format!("C{n}")).collect::<Vec<_>>().join("x");
    let f = factors.to_vec();
    FiniteGroup::from_closure(
        if k == 0 { "C1".to_string() } else { name },
        vec![0usize; k],
        &gens,
        move |a, b| a.iter().zip(b).zip(&f).map(|((x, y), n)| (x + y) % n).collect(),
        |a| format!("({})", a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
    )
}

fn word(parts: &[(&str, usize)]) -> String {
    let s: String = parts
        .iter()
        .filter(|(_, e)| *e > 0)
        .map(|(g, e)| if *e == 1 { g.to_string() } else { format!("{g}^{e}") })
        .collect();
    if s.is_empty() {
        "e".into()
    } else {
        s
    }
}

/// Dihedral group of order `2n`: `aⁿ = b² = e`, `bab⁻¹ = a⁻¹`.
pub fn dihedral(n: usize) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::from_closure(
        format!("D{}", 2 * n),
        (0usize, 0usize),
        &[(1, 0), (0, 1)],
        move |&(i, j), &(k, l)| {
            let k = if j == 1 { (n - k) % n } else { k };
            ((i + k) % n, (j + l) % 2)
        },
        |&(i, j)| word(&[("a", i), ("b", j)]),
    )
}

/// Generalised quaternion group of order `4n`: `a^{2n} = e`, `b² = aⁿ`, `bab⁻¹ = a⁻¹`.
pub fn quaternion(n: usize) -> Result<FiniteGroup, GroupError> {
    let m = 2 * n;
    FiniteGroup::from_closure(
        format!("Q{}", 4 * n),
        (0usize, 0usize),
        &[(1, 0), (0, 1)],
        move |&(i, j), &(k, l)| {
            let k = if j == 1 { (m - k) % m } else { k };
            let extra = if j + l == 2 { n } else { 0 };
            ((i + k + extra) % m, (j + l) % 2)
        },
        |&(i, j)| word(&[("a", i), ("b", j)]),
    )
}

/// Upper unitriangular 3×3 matrices over `Z/p`, as `(a, b, c)` for
/// `[[1, a, c], [0, 1, b], [0, 0, 1]]`.
pub fn heisenberg_group(p: usize) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::from_closure(
        format!("Heis({p})"),
        (0usize, 0usize, 0usize),
        &[(1, 0, 0), (0, 1, 0)],
        move |&(a, b, c), &(x, y, z)| ((a + x) % p, (b + y) % p, (c + z + a * y) % p),
        |&(a, b, c)| format!("[{a},{b},{c}]"),
    )
}

/// Extraspecial group of order `p³` and exponent `p²`:
/// `a^{p²} = b^p = e`, `bab⁻¹ = a^{1+p}`.
pub fn extraspecial_exp_p2(p: usize) -> Result<FiniteGroup, GroupError> {
    let m = p * p;
    let twist: Vec<usize> = (0..p).map(|j| arith::mod_pow(1 + p as u64, j as u64, m as u64) as usize).collect();
    FiniteGroup::from_closure(
        format!("M({})", p * p * p),
        (0usize, 0usize),
        &[(1, 0), (0, 1)],
        move |&(i, j), &(k, l)| ((i + k * twist[j]) % m, (j + l) % p),
        |&(i, j)| word(&[("a", i), ("b", j)]),
    )
}

/// Symmetric group on `n` letters.
pub fn symmetric(n: usize) -> Result<FiniteGroup, GroupError> {
    let id: Vec<u8> = (0..n as u8).collect();
    let mut gens = Vec::new();
    if n >= 2 {
        let mut t = id.clone();
        t.swap(0, 1);
        gens.push(t);
        let c: Vec<u8> = (0..n as u8).map(|i| (i + 1) % n as u8).collect();
        gens.push(c);
    }
    FiniteGroup::from_closure(
        format!("S{n}"),
        id,
        &gens,
        |a, b| b.iter().map(|&i| a[i as usize]).collect(),
        |a| format!("{a:?}"),
    )
}

/// The group generated by permutations of `0..n`, each given as its list of images.
pub fn permutation_group(name: impl Into<String>, gens: &[Vec<usize>]) -> Result<FiniteGroup, GroupError> {
    let n = gens.first().map_or(0, Vec::len);
    for g in gens {
        let mut seen = vec![false; n];
        if g.len() != n || g.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(GroupError::Parse(format!("{g:?} is not a permutation of 0..{n}")));
        }
    }
    FiniteGroup::from_closure(
        name,
        (0..n).collect::<Vec<usize>>(),
        gens,
        |a, b| b.iter().map(|&i| a[i]).collect(),
        |p| format!("{p:?}"),
    )
}

pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<FiniteGroup, GroupError> {
    if g.order() * h.order() > MAX_GROUP_ORDER {
        return Err(GroupError::TooLarge(g.order() * h.order()));
    }
    let gens: Vec<(usize, usize)> = g.elements().map(|x| (x, 0)).chain(h.elements().map(|y| (0, y))).collect();
    FiniteGroup::from_closure(
        format!("{}x{}", g.name, h.name),
        (0usize, 0usize),
        &gens,
        |&(a, b), &(c, d)| (g.mul(a, c), h.mul(b, d)),
        |&(a, b)| format!("({},{})", g.label(a), h.label(b)),
    )
}

/// Parses `group:<name>` with names `C6`, `C2xC4`, `D8`, `Q8`, `S3`,
/// `heis(3)`, `extraspecial(5)`, `cayley:<file or rows>` or
/// `perm:<generators>`. Inline rows separate entries by `,` and rows by `;`;
/// permutation generators are image lists in the same format.
pub fn parse_group_spec(spec: &str) -> Result<FiniteGroup, GroupError> {
    let bad = || GroupError::Parse(spec.to_string());
    let body = spec.trim().strip_prefix("group:").ok_or_else(bad)?;
    if let Some(src) = body.strip_prefix("cayley:") {
        let text = match std::fs::read_to_string(src) {
            Ok(t) => t,
            Err(_) if src.contains(',') => src.replace(';', "\n"),
            Err(e) => return Err(GroupError::Parse(format!("{src}: {e}"))),
        };
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split(',').map(|x| x.trim().parse::<usize>().map_err(|_| bad())).collect())
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        return FiniteGroup::from_cayley("cayley", rows);
    }
    if let Some(src) = body.strip_prefix("perm:") {
        let gens = src
            .split(';')
            .map(|g| g.split(',').map(|x| x.trim().parse::<usize>().map_err(|_| bad())).collect())
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        return permutation_group("perm", &gens);
    }
    let lower = body.to_ascii_lowercase();
    let arg = |prefix: &str| -> Option<Result<usize, GroupError>> {
        lower
            .strip_prefix(prefix)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
            .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
    };
    if let Some(p) = arg("heis") {
        return heisenberg_group(p?);
    }
    if let Some(p) = arg("extraspecial") {
        return extraspecial_exp_p2(p?);
    }
    if lower.split('x').all(|f| f.starts_with('c') && f[1..].parse::<usize>().is_ok()) {
        let factors: Vec<usize> = lower.split('x').map(|f| f[1..].parse().unwrap()).collect();
        if factors.iter().any(|&f| f == 0) {
            return Err(bad());
        }
        return if factors.len() == 1 { cyclic(factors[0]) } else { abelian(&factors) };
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    if let Some(n) = lower.strip_prefix('d') {
        let n = num(n)?;
        return if n >= 2 && n % 2 == 0 { dihedral(n / 2) } else { Err(bad()) };
    }
    if let Some(n) = lower.strip_prefix('q') {
        let n = num(n)?;
        return if n >= 8 && n % 4 == 0 { quaternion(n / 4) } else { Err(bad()) };
    }
    if let Some(n) = lower.strip_prefix('s') {
        return symmetric(num(n)?);
    }
    if lower == "v4" {
        return abelian(&[2, 2]);
    }
    Err(bad())
}

// ---------------------------------------------------------------- transfer

/// `T_{G/H}(x) = ∏ t_{σ(i)}⁻¹ x t_i` in `H/[H,H]`, with a least-id left
/// transversal. Returned as the least element of the class `h·[H,H]`.
pub fn transfer(g: &FiniteGroup, h: &[usize], x: usize) -> Result<usize, GroupError> {
    if !g.is_subgroup(h) {
        return Err(GroupError::NotSubgroup);
    }
    transfer_with_transversal(g, h, &g.left_transversal(h), x)
}

pub fn transfer_with_transversal(g: &FiniteGroup, h: &[usize], transversal: &[usize], x: usize) -> Result<usize, GroupError> {
    let mut in_h = vec![false; g.order()];
    h.iter().for_each(|&y| in_h[y] = true);
    let mut prod = 0;
    for &t in transversal {
        let xt = g.mul(x, t);
        let s = transversal
            .iter()
            .copied()
            .find(|&s| in_h[g.mul(g.inv(s), xt)])
            .ok_or(GroupError::NotSubgroup)?;
        prod = g.mul(prod, g.mul(g.inv(s), xt));
    }
    let hh = g.commutator_of(h, h);
    Ok(hh.iter().map(|&c| g.mul(prod, c)).min().unwrap())
}

/// `x^{-[G:H]}·T_{G/H}(x)`.
pub fn transfer_correction(g: &FiniteGroup, h: &[usize], x: usize) -> Result<usize, GroupError> {
    let d = (g.order() / h.len()) as i64;
    Ok(g.mul(g.pow(x, -d), transfer(g, h, x)?))
}

/// `T_{G/H}` for abelian normal `H` with `G/H` abelian and `G` two-step
/// nilpotent, from the decomposition `x = t_1^{a_1}⋯t_s^{a_s}·h` over an
/// invariant-factor basis of `G/H`, with `T(t_i) = t_i^d·[t_i^{m_i}, α_i]`
/// and `T(h) = h^d·[h, α]`.
#[derive(Clone, Debug)]
pub struct DecomposedTransfer {
    proj: Vec<usize>,
    divisors: ElementaryDivisors,
    ts: Vec<usize>,
    t_images: Vec<usize>,
    alpha: usize,
    d: i64,
}

impl DecomposedTransfer {
    pub fn new(g: &FiniteGroup, h: &[usize]) -> Result<Self, GroupError> {
        if !g.is_two_step_nilpotent() {
            return Err(GroupError::NotTwoStepNilpotent);
        }
        let (hg, _) = g.subgroup_group(h)?;
        if !hg.is_abelian() {
            return Err(GroupError::NotAbelian);
        }
        let (q, proj) = g.quotient(h)?;
        let divisors = elementary_divisors(&q)?;
        let d = q.order() as i64;
        let mut lift = vec![usize::MAX; q.order()];
        for y in g.elements().rev() {
            lift[proj[y]] = y;
        }
        let ts: Vec<usize> = divisors.basis.iter().map(|&b| lift[b]).collect();
        let product_over = |skip: Option<usize>| -> usize {
            let c = q.elements().filter(|&y| skip.map_or(true, |i| divisors.coordinates(y)[i] == 0));
            lift[c.fold(0, |acc, y| q.mul(acc, y))]
        };
        let alpha = product_over(None);
        let t_images = ts
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let m = divisors.factors[i] as i64;
                g.mul(g.pow(t, d), g.commutator(g.pow(t, m), product_over(Some(i))))
            })
            .collect();
        Ok(DecomposedTransfer { proj, divisors, ts, t_images, alpha, d })
    }

    pub fn apply(&self, g: &FiniteGroup, x: usize) -> usize {
        let coords = self.divisors.coordinates(self.proj[x]);
        let mut head = 0;
        let mut value = 0;
        for ((&t, &img), &a) in self.ts.iter().zip(&self.t_images).zip(coords) {
            head = g.mul(head, g.pow(t, a as i64));
            value = g.mul(value, g.pow(img, a as i64));
        }
        let rest = g.mul(g.inv(head), x);
        g.mul(value, g.mul(g.pow(rest, self.d), g.commutator(rest, self.alpha)))
    }
}

pub fn transfer_by_decomposition(g: &FiniteGroup, h: &[usize], x: usize) -> Result<usize, GroupError> {
    Ok(DecomposedTransfer::new(g, h)?.apply(g, x))
}

/// Two-step nilpotent groups of order at most 128 built from the named
/// constructors and direct products.
pub fn two_step_examples() -> Result<Vec<FiniteGroup>, GroupError> {
    let d8 = dihedral(4)?;
    let q8 = quaternion(2)?;
    let h3 = heisenberg_group(3)?;
    let m27 = extraspecial_exp_p2(3)?;
    let mut out = vec![
        d8.clone(),
        q8.clone(),
        h3.clone(),
        m27.clone(),
        heisenberg_group(5)?,
        extraspecial_exp_p2(5)?,
        direct_product(&d8, &cyclic(2)?)?,
        direct_product(&d8, &cyclic(3)?)?,
        direct_product(&q8, &cyclic(3)?)?,
        direct_product(&d8, &cyclic(4)?)?,
        direct_product(&q8, &cyclic(4)?)?,
        direct_product(&h3, &cyclic(2)?)?,
        direct_product(&h3, &cyclic(3)?)?,
        direct_product(&m27, &cyclic(3)?)?,
        direct_product(&d8, &q8)?,
        direct_product(&d8, &abelian(&[2, 2])?)?,
        direct_product(&q8, &cyclic(15)?)?,
        direct_product(&h3, &cyclic(4)?)?,
        direct_product(&direct_product(&d8, &q8)?, &cyclic(2)?)?,
    ];
    out.retain(|g| g.order() <= 128);
    Ok(out)
}

/// Product of all elements of an abelian group.
pub fn miller_product(a: &FiniteGroup) -> Result<usize, GroupError> {
    if !a.is_abelian() {
        return Err(GroupError::NotAbelian);
    }
    Ok(a.elements().fold(0, |acc, x| a.mul(acc, x)))
}

// ---------------------------------------------------------------- abelian structure

#[derive(Clone, Debug)]
pub struct ElementaryDivisors {
    /// Invariant factors `m_1 | m_2 | … | m_s`.
    pub factors: Vec<u64>,
    pub two_rank: usize,
    /// Elements `t_i` of order `m_i` with `A = ⟨t_1⟩ × … × ⟨t_s⟩`.
    pub basis: Vec<usize>,
    coords: Vec<Vec<u64>>,
}

impl ElementaryDivisors {
    /// Exponents `a_i` with `x = ∏ t_i^{a_i}`, `0 ≤ a_i < m_i`.
    pub fn coordinates(&self, x: usize) -> &[u64] {
        &self.coords[x]
    }
}

/// Invariant factors of an abelian group with a basis witness.
pub fn elementary_divisors(a: &FiniteGroup) -> Result<ElementaryDivisors, GroupError> {
    if !a.is_abelian() {
        return Err(GroupError::NotAbelian);
    }
    let n = a.order() as u64;
    // per prime: cyclic factors of a basis of the p-primary part, largest first
    let mut primary: Vec<Vec<(usize, u64)>> = Vec::new();
    for (p, _) in arith::factor(n) {
        let part: Vec<usize> = a.elements().filter(|&x| arith::prime_power(a.element_order(x) as u64).map_or(x == 0, |(q, _)| q == p)).collect();
        let mut span = vec![0usize];
        let mut gens = Vec::new();
        while span.len() < part.len() {
            // element whose order modulo the current span is maximal and attained in A
            let mut best: Option<(usize, u64)> = None;
            for &x in &part {
                let ord = a.element_order(x) as u64;
                let mut k = 1;
                let mut y = x;
                while span.binary_search(&y).is_err() {
                    y = a.mul(y, x);
                    k += 1;
                }
                if k == ord && best.map_or(true, |(_, b)| k > b) {
                    best = Some((x, k));
                }
            }
            let (x, k) = best.expect("a p-group always has a splitting element");
            gens.push((x, k));
            let mut all: Vec<usize> = gens.iter().map(|g| g.0).collect();
            all.sort_unstable();
            span = a.generate(&all);
        }
        primary.push(gens);
    }
    let s = primary.iter().map(Vec::len).max().unwrap_or(0);
    let mut factors = Vec::with_capacity(s);
    let mut basis = Vec::with_capacity(s);
    for i in 0..s {
        let (mut t, mut m) = (0usize, 1u64);
        for gens in &primary {
            if let Some(&(x, k)) = gens.get(i) {
                t = a.mul(t, x);
                m *= k;
            }
        }
        factors.push(m);
        basis.push(t);
    }
    factors.reverse();
    basis.reverse();
    let mut coords = vec![Vec::new(); a.order()];
    let mut idx = vec![0u64; s];
    loop {
        let x = basis.iter().zip(&idx).fold(0, |acc, (&t, &e)| a.mul(acc, a.pow(t, e as i64)));
        coords[x] = idx.clone();
        let mut j = 0;
        while j < s {
            idx[j] += 1;
            if idx[j] < factors[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == s {
            break;
        }
    }
    let two_rank = factors.iter().filter(|m| *m % 2 == 0).count();
    Ok(ElementaryDivisors { factors, two_rank, basis, coords })
}

// ---------------------------------------------------------------- bicharacters

/// An alternating bicharacter on an abelian group with values in `μ_N`,
/// stored as exponents.
#[derive(Clone, Debug)]
pub struct AltBichar {
    group: Arc<FiniteGroup>,
    order: u64,
    exps: Vec<u64>,
}

impl AltBichar {
    /// Tabulates `f` and checks the alternating and bimultiplicative laws.
    pub fn new(group: Arc<FiniteGroup>, f: impl Fn(usize, usize) -> RootOfUnity) -> Result<Self, GroupError> {
        if !group.is_abelian() {
            return Err(GroupError::NotAbelian);
        }
        let n = group.order();
        let vals: Vec<RootOfUnity> = (0..n * n).map(|k| f(k / n, k % n)).collect();
        let order = vals.iter().fold(1, |acc, v| arith::lcm(acc, v.order()));
        let exps = vals.iter().map(|v| v.exponent_in(order)).collect();
        let x = AltBichar { group, order, exps };
        x.validate()?;
        Ok(x)
    }

    fn validate(&self) -> Result<(), GroupError> {
        let g = &self.group;
        for a in g.elements() {
            if !self.value(a, a).is_one() {
                return Err(GroupError::NotAlternating(format!("X({a},{a}) ≠ 1")));
            }
            for b in g.elements() {
                for c in g.elements() {
                    if self.value(g.mul(a, b), c) != self.value(a, c).mul(&self.value(b, c)) {
                        return Err(GroupError::NotAlternating(format!("not multiplicative at ({a},{b};{c})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn value(&self, a: usize, b: usize) -> RootOfUnity {
        RootOfUnity::new(self.exps[a * self.group.order() + b] as i64, self.order)
    }

    fn trivial(&self, a: usize, b: usize) -> bool {
        self.exps[a * self.group.order() + b] == 0
    }

    pub fn radical(&self) -> Subgroup {
        let g = &self.group;
        g.elements().filter(|&a| g.elements().all(|b| self.trivial(a, b))).collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical().len() == 1
    }

    /// Elements orthogonal to every element of `s`.
    pub fn perp(&self, s: &[usize]) -> Subgroup {
        self.group.elements().filter(|&a| s.iter().all(|&b| self.trivial(a, b))).collect()
    }

    pub fn is_isotropic(&self, h: &[usize]) -> bool {
        h.iter().all(|&a| h.iter().all(|&b| self.trivial(a, b)))
    }
}

/// Pairs `(t_i, t_i′, m_i)` with `X(t_i, t_i′)` of exact order `m_i`,
/// `m_1 | m_2 | …`, spanning `A` as an orthogonal sum of hyperbolic planes.
pub fn symplectic_basis(x: &AltBichar) -> Result<Vec<(usize, usize, u64)>, GroupError> {
    let rad = x.radical();
    if rad.len() > 1 {
        return Err(GroupError::Degenerate(rad));
    }
    let g = x.group();
    let mut pairs = Vec::new();
    let mut rest: Subgroup = g.elements().collect();
    while rest.len() > 1 {
        let t = *rest.iter().max_by_key(|&&a| (g.element_order(a), std::cmp::Reverse(a))).unwrap();
        let m = g.element_order(t) as u64;
        let t2 = *rest
            .iter()
            .find(|&&b| x.value(t, b).order() == m)
            .ok_or_else(|| GroupError::Degenerate(vec![t]))?;
        pairs.push((t, t2, m));
        let perp = x.perp(&[t, t2]);
        rest.retain(|a| perp.binary_search(a).is_ok());
    }
    pairs.reverse();
    Ok(pairs)
}

/// A maximal isotropic subgroup (`H = H^⊥`), containing `seed` if given.
pub fn maximal_isotropic(x: &AltBichar, seed: Option<usize>) -> Result<Subgroup, GroupError> {
    let rad = x.radical();
    if rad.len() > 1 {
        return Err(GroupError::Degenerate(rad));
    }
    let g = x.group();
    let mut h = g.generate(&seed.into_iter().collect::<Vec<_>>());
    loop {
        let perp = x.perp(&h);
        match perp.iter().find(|a| h.binary_search(a).is_err()) {
            None => return Ok(h),
            Some(&a) => {
                let mut gens = h.clone();
                gens.push(a);
                h = g.generate(&gens);
            }
        }
    }
}

// ---------------------------------------------------------------- counting

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BicyclicCounts {
    /// Cyclic subgroups of order `m` in `Z/m × Z/m`.
    pub psi: u64,
    pub order_m_elements: u64,
    /// Complements of a fixed cyclic factor of order `m`.
    pub complements: u64,
}

pub fn bicyclic_counts(m: u64) -> BicyclicCounts {
    let ps = arith::prime_divisors(m);
    let psi = ps.iter().fold(m, |acc, p| acc / p * (p + 1));
    let order_m_elements = ps.iter().fold(m * m, |acc, p| acc / (p * p) * (p * p - 1));
    BicyclicCounts { psi, order_m_elements, complements: m }
}

// ---------------------------------------------------------------- Sylow 2

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sylow2Type {
    Trivial,
    Cyclic(usize),
    MetacyclicNotCyclic { order: usize, contains_klein: bool },
    NotMetacyclic { order: usize, contains_klein: bool },
}

/// A Sylow `p`-subgroup, grown one step at a time inside normalisers.
pub fn sylow_subgroup(g: &FiniteGroup, p: usize) -> Subgroup {
    let target = {
        let n = g.order();
        let mut t = 1;
        while n % (t * p) == 0 {
            t *= p;
        }
        t
    };
    let mut s: Subgroup = vec![0];
    while s.len() < target {
        let norm = g.normalizer(&s);
        let x = norm
            .into_iter()
            .find(|&x| s.binary_search(&x).is_err() && s.binary_search(&g.pow(x, p as i64)).is_ok())
            .expect("a non-Sylow p-subgroup grows inside its normaliser");
        let mut gens = s.clone();
        gens.push(x);
        s = g.generate(&gens);
    }
    s
}

/// Whether `h ≤ g` has a cyclic normal subgroup with cyclic quotient.
pub fn is_metacyclic(g: &FiniteGroup, h: &[usize]) -> bool {
    let mut tried = std::collections::HashSet::new();
    for &n in h {
        let c = g.generate(&[n]);
        if !tried.insert(c.clone()) {
            continue;
        }
        let normal_in_h = h.iter().all(|&x| c.iter().all(|&y| c.binary_search(&g.conj(x, y)).is_ok()));
        if !normal_in_h {
            continue;
        }
        if h.iter().any(|&s| g.generate(&[n, s]).len() == h.len()) {
            return true;
        }
    }
    false
}

/// Whether `h` contains two distinct commuting involutions.
pub fn contains_klein(g: &FiniteGroup, h: &[usize]) -> bool {
    let inv: Vec<usize> = h.iter().copied().filter(|&x| x != 0 && g.mul(x, x) == 0).collect();
    inv.iter().any(|&a| inv.iter().any(|&b| a != b && g.mul(a, b) == g.mul(b, a)))
}

pub fn sylow2_type(g: &FiniteGroup) -> (Sylow2Type, Subgroup) {
    let s = sylow_subgroup(g, 2);
    let order = s.len();
    let t = if order == 1 {
        Sylow2Type::Trivial
    } else if s.iter().any(|&x| g.element_order(x) == order) {
        Sylow2Type::Cyclic(order)
    } else {
        let contains_klein = contains_klein(g, &s);
        if is_metacyclic(g, &s) {
            Sylow2Type::MetacyclicNotCyclic { order, contains_klein }
        } else {
            Sylow2Type::NotMetacyclic { order, contains_klein }
        }
    };
    (t, s)
}

//! Finite groups and loops stored as dense multiplication tables.
//!
//! Elements are the indices `0..order` and the identity is always index 0.
//! Loops (non-associative tables with a two-sided identity and two-sided
//! inverses) share the representation and are flagged by
//! [`FiniteGroup::is_associative`].

mod hom;
pub mod io;
pub(crate) mod perm;
mod subgroup;

pub use hom::Homomorphism;
pub use perm::{cycle_notation, perm_group};
pub use subgroup::{PGroupStatus, Subgroup, DEFAULT_SUBGROUP_BOUND};
pub(crate) use subgroup::prime_factors;

use crate::error::{Error, Result};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use std::hash::{Hash, Hasher};

/// Hard cap on table size; S_7 (order 5040) already needs a 25M-entry table.
pub const MAX_TABLE_ORDER: usize = 5040;

/// The families the library can build directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(usize),
    Symmetric(usize),
    Alternating(usize),
    /// Dihedral group of the given order `2n`, the symmetries of an n-gon.
    Dihedral(usize),
    Trivial,
    DirectProduct(Box<FiniteGroup>, Box<FiniteGroup>),
    FromTable { name: String, table: Vec<Vec<usize>>, loop_mode: bool },
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    labels: Option<Vec<String>>,
    associative: bool,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul
    }
}

impl Eq for FiniteGroup {}

impl Hash for FiniteGroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.order.hash(state);
        self.mul.hash(state);
    }
}

pub fn make_group(kind: GroupKind) -> Result<FiniteGroup> {
    match kind {
        GroupKind::Cyclic(n) => FiniteGroup::cyclic(n),
        GroupKind::Symmetric(n) => FiniteGroup::symmetric(n),
        GroupKind::Alternating(n) => FiniteGroup::alternating(n),
        GroupKind::Dihedral(n) => FiniteGroup::dihedral(n),
        GroupKind::Trivial => Ok(FiniteGroup::trivial()),
        GroupKind::DirectProduct(a, b) => FiniteGroup::direct_product(&a, &b),
        GroupKind::FromTable { name, table, loop_mode } => {
            FiniteGroup::from_table(name, &table, None, loop_mode)
        }
    }
}

impl FiniteGroup {
    pub fn trivial() -> Self {
        FiniteGroup {
            name: "1".into(),
            order: 1,
            mul: vec![0],
            inv: vec![0],
            labels: None,
            associative: true,
        }
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("cyclic group of order 0".into()));
        }
        check_order(n)?;
        let mul = (0..n)
            .flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32))
            .collect();
        let inv = (0..n).map(|a| ((n - a) % n) as u32).collect();
        Ok(FiniteGroup {
            name: if n == 1 { "1".into() } else { format!("Z{n}") },
            order: n,
            mul,
            inv,
            labels: None,
            associative: true,
        })
    }

    /// S_n with elements in lexicographic order of their image lists.
    /// The product is composition with the right factor applied first.
    pub fn symmetric(n: usize) -> Result<Self> {
        Ok(perm_group(format!("S{n}"), symmetric_perms(n, false)?)?.0)
    }

    pub fn alternating(n: usize) -> Result<Self> {
        Ok(perm_group(format!("A{n}"), symmetric_perms(n, true)?)?.0)
    }

    pub fn dihedral(order: usize) -> Result<Self> {
        Ok(perm_group(format!("D{order}"), dihedral_perms(order)?)?.0)
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self> {
        let order = a.order * b.order;
        check_order(order)?;
        let nb = b.order;
        let mut mul = Vec::with_capacity(order * order);
        for x in 0..order {
            for y in 0..order {
                let (xa, xb) = (x / nb, x % nb);
                let (ya, yb) = (y / nb, y % nb);
                mul.push((a.mul(xa, ya) * nb + b.mul(xb, yb)) as u32);
            }
        }
        let inv = (0..order)
            .map(|x| (a.inv(x / nb) * nb + b.inv(x % nb)) as u32)
            .collect();
        let labels = (0..order)
            .map(|x| format!("({},{})", a.label(x / nb), b.label(x % nb)))
            .collect();
        Ok(FiniteGroup {
            name: format!("{} x {}", a.name, b.name),
            order,
            mul,
            inv,
            labels: Some(labels),
            associative: a.associative && b.associative,
        })
    }

    /// Builds a group (or, with `loop_mode`, a loop) from a raw table.
    ///
    /// If the identity is not element 0 it is swapped into position 0, and the
    /// labels (when given) follow the relabelling.
    pub fn from_table(
        name: impl Into<String>,
        table: &[Vec<usize>],
        labels: Option<Vec<String>>,
        loop_mode: bool,
    ) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::TableNotLatin("empty table".into()));
        }
        check_order(n)?;
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::TableNotLatin(format!("row {i} has length {} (expected {n})", row.len())));
            }
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::InvalidParameter(format!("{} labels for order {n}", l.len())));
            }
        }
        check_latin(n, |a, b| table[a][b])?;
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(Error::NoIdentity)?;
        // relabel so that the identity is 0
        let relabel = |x: usize| {
            if x == e {
                0
            } else if x == 0 {
                e
            } else {
                x
            }
        };
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[relabel(a) * n + relabel(b)] = relabel(table[a][b]) as u32;
            }
        }
        let labels = labels.map(|mut l| {
            l.swap(0, e);
            l
        });
        let mut inv = vec![0u32; n];
        for x in 0..n {
            let right = (0..n).find(|&y| mul[x * n + y] == 0).ok_or(Error::MissingInverse(x))?;
            if mul[right * n + x] != 0 {
                return Err(Error::MissingInverse(x));
            }
            inv[x] = right as u32;
        }
        let mut g = FiniteGroup {
            name: name.into(),
            order: n,
            mul,
            inv,
            labels,
            associative: true,
        };
        match g.find_nonassociative_triple() {
            None => {}
            Some(_) if loop_mode => g.associative = false,
            Some((a, b, c)) => return Err(Error::NotAssociative(a, b, c)),
        }
        Ok(g)
    }

    /// The smallest loop that is not a group: elements `1 a b c d`.
    pub fn smallest_nonassociative_loop() -> Self {
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let labels = ["1", "a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        FiniteGroup::from_table("L5", &table, Some(labels), true).expect("valid loop table")
    }

    /// Reinterprets a group table as a loop (disables group-only operations).
    pub fn as_loop(&self) -> Self {
        let mut g = self.clone();
        g.associative = false;
        g
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// The unique `x` with `a * x = c`.
    pub fn left_div(&self, a: usize, c: usize) -> usize {
        if self.associative {
            self.mul(self.inv(a), c)
        } else {
            (0..self.order).find(|&x| self.mul(a, x) == c).expect("Latin square")
        }
    }

    pub fn is_associative(&self) -> bool {
        self.associative
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn element_by_label(&self, label: &str) -> Option<usize> {
        (0..self.order).find(|&x| self.label(x) == label)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
            if k > self.order {
                // only reachable in loops, where powers need not cycle back
                return 0;
            }
        }
        k
    }

    pub(crate) fn require_group(&self) -> Result<()> {
        if self.associative {
            return Ok(());
        }
        let (a, b, c) = self.find_nonassociative_triple().unwrap_or((0, 0, 0));
        Err(Error::NotAssociative(a, b, c))
    }

    /// Exhaustive for orders up to 256, otherwise 10^5 seeded samples.
    fn find_nonassociative_triple(&self) -> Option<(usize, usize, usize)> {
        let n = self.order;
        if n <= 256 {
            (0..n)
                .cartesian_product(0..n)
                .cartesian_product(0..n)
                .map(|((a, b), c)| (a, b, c))
                .find(|&(a, b, c)| self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)))
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
            (0..100_000)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
                .find(|&(a, b, c)| self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)))
        }
    }
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_TABLE_ORDER {
        return Err(Error::OrderBoundExceeded { order: n, bound: MAX_TABLE_ORDER });
    }
    Ok(())
}

fn check_latin(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<()> {
    let mut seen = vec![false; n];
    for a in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        for b in 0..n {
            let c = f(a, b);
            if c >= n || std::mem::replace(&mut seen[c], true) {
                return Err(Error::TableNotLatin(format!("row {a} repeats or overflows at column {b}")));
            }
        }
    }
    for b in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        for a in 0..n {
            if std::mem::replace(&mut seen[f(a, b)], true) {
                return Err(Error::TableNotLatin(format!("column {b} repeats at row {a}")));
            }
        }
    }
    Ok(())
}

pub(crate) fn symmetric_perms(n: usize, even_only: bool) -> Result<Vec<Vec<usize>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("symmetric group on 0 points".into()));
    }
    if n > 7 {
        return Err(Error::OrderBoundExceeded { order: (1..=n).product(), bound: MAX_TABLE_ORDER });
    }
    Ok((0..n)
        .permutations(n)
        .filter(|p| !even_only || perm::is_even(p))
        .collect())
}

/// Rotations `w -> w - i` first, then reflections `w -> i - w`.
pub(crate) fn dihedral_perms(order: usize) -> Result<Vec<Vec<usize>>> {
    if order < 2 || !order.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("dihedral group order {order} must be even and >= 2")));
    }
    let n = order / 2;
    let rot = (0..n).map(|i| (0..n).map(|w| (w + n - i) % n).collect());
    let refl = (0..n).map(|i| (0..n).map(|w| (i + n - w) % n).collect());
    let mut perms: Vec<Vec<usize>> = rot.chain(refl).collect();
    if n <= 2 {
        // D2 and D4 act unfaithfully on 1 and 2 points; realize them on 2n points
        perms = dihedral_regular(n);
    }
    Ok(perms)
}

fn dihedral_regular(n: usize) -> Vec<Vec<usize>> {
    // left-regular representation of <r, s | r^n, s^2, srs = r^-1>
    let elem = |flip: usize, rot: usize| flip * n + rot;
    let compose = |(f1, r1): (usize, usize), (f2, r2): (usize, usize)| {
        // s^f1 r^r1 s^f2 r^r2 = s^(f1+f2) r^(±r1 + r2)
        let r = if f2 == 1 { (n - r1 % n + r2) % n } else { (r1 + r2) % n };
        ((f1 + f2) % 2, r)
    };
    let all: Vec<(usize, usize)> = (0..2).flat_map(|f| (0..n).map(move |r| (f, r))).collect();
    all.iter()
        .map(|&g| all.iter().map(|&x| { let (f, r) = compose(g, x); elem(f, r) }).collect())
        .collect()
}

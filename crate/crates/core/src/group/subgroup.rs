use super::{FiniteGroup, Homomorphism};
use crate::error::{Error, Result};
use itertools::Itertools;
use std::collections::{BTreeSet, HashSet, VecDeque};

/// Default bound on |G| for subgroup enumeration.
pub const DEFAULT_SUBGROUP_BOUND: usize = 64;

/// A subgroup of some parent group, as a sorted member list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    members: Vec<usize>,
    normal: bool,
}

impl Subgroup {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn is_normal(&self) -> bool {
        self.normal
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

/// Outcome of asking whether a group has prime-power order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PGroupStatus {
    /// The trivial group, a p-group for every prime.
    Trivial,
    Prime(u64),
    NotPGroup,
}

impl PGroupStatus {
    pub fn prime(self) -> Option<u64> {
        match self {
            PGroupStatus::Prime(p) => Some(p),
            _ => None,
        }
    }

    /// Two statuses admit a common prime.
    pub fn compatible(self, other: PGroupStatus) -> bool {
        use PGroupStatus::*;
        match (self, other) {
            (NotPGroup, _) | (_, NotPGroup) => false,
            (Trivial, _) | (_, Trivial) => true,
            (Prime(p), Prime(q)) => p == q,
        }
    }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == [n]
}

impl FiniteGroup {
    /// Closure of `gens` under multiplication.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Result<Subgroup> {
        self.require_group()?;
        if let Some(&bad) = gens.iter().find(|&&g| g >= self.order()) {
            return Err(Error::InvalidParameter(format!("element {bad} out of range")));
        }
        let members = self.closure(gens.iter().copied());
        let normal = self.is_normal_set(&members);
        Ok(Subgroup { members, normal })
    }

    /// Wraps an explicit member list, checking closure.
    pub fn subgroup_from_members(&self, members: &[usize]) -> Result<Subgroup> {
        self.require_group()?;
        let set: BTreeSet<usize> = members.iter().copied().collect();
        if !set.contains(&0) || set.iter().any(|&x| x >= self.order()) {
            return Err(Error::InvalidParameter("subset lacks the identity or is out of range".into()));
        }
        for &a in &set {
            if !set.contains(&self.inv(a)) || set.iter().any(|&b| !set.contains(&self.mul(a, b))) {
                return Err(Error::InvalidParameter("subset is not closed".into()));
            }
        }
        let members: Vec<usize> = set.into_iter().collect();
        let normal = self.is_normal_set(&members);
        Ok(Subgroup { members, normal })
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { members: vec![0], normal: true }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { members: self.elements().collect(), normal: true }
    }

    fn closure(&self, gens: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let gens: Vec<usize> = gens.into_iter().filter(|&g| g != 0).collect();
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&x| seen[x]).collect()
    }

    fn is_normal_set(&self, members: &[usize]) -> bool {
        let mut inside = vec![false; self.order()];
        members.iter().for_each(|&x| inside[x] = true);
        self.elements()
            .all(|g| members.iter().all(|&s| inside[self.mul(self.mul(g, s), self.inv(g))]))
    }

    fn check_bound(&self, bound: usize) -> Result<()> {
        self.require_group()?;
        if self.order() > bound {
            return Err(Error::OrderBoundExceeded { order: self.order(), bound });
        }
        Ok(())
    }

    /// Every subgroup, found by closing generated subgroups under adjoining
    /// one element at a time. Sorted by size, then member list.
    pub fn all_subgroups(&self, bound: usize) -> Result<Vec<Subgroup>> {
        self.check_bound(bound)?;
        let mut found: HashSet<Vec<usize>> = HashSet::new();
        let mut queue = VecDeque::new();
        let trivial = vec![0];
        found.insert(trivial.clone());
        queue.push_back(trivial);
        while let Some(sub) = queue.pop_front() {
            let mut inside = vec![false; self.order()];
            sub.iter().for_each(|&x| inside[x] = true);
            for g in self.elements().filter(|&g| !inside[g]) {
                let bigger = self.closure(sub.iter().copied().chain([g]));
                if found.insert(bigger.clone()) {
                    queue.push_back(bigger);
                }
            }
        }
        Ok(self.sorted_subgroups(found))
    }

    fn sorted_subgroups(&self, sets: impl IntoIterator<Item = Vec<usize>>) -> Vec<Subgroup> {
        let mut out: Vec<Subgroup> = sets
            .into_iter()
            .map(|members| {
                let normal = self.is_normal_set(&members);
                Subgroup { members, normal }
            })
            .collect();
        out.sort_by(|a, b| a.members.len().cmp(&b.members.len()).then_with(|| a.members.cmp(&b.members)));
        out
    }

    pub fn normal_subgroups(&self) -> Result<Vec<Subgroup>> {
        self.normal_subgroups_bounded(DEFAULT_SUBGROUP_BOUND)
    }

    /// All normal subgroups: joins of normal closures of single elements.
    pub fn normal_subgroups_bounded(&self, bound: usize) -> Result<Vec<Subgroup>> {
        self.check_bound(bound)?;
        let class_closures: Vec<Vec<usize>> = self
            .elements()
            .map(|x| self.closure(self.elements().map(|g| self.mul(self.mul(g, x), self.inv(g)))))
            .unique()
            .collect();
        let mut found: HashSet<Vec<usize>> = class_closures.iter().cloned().collect();
        found.insert(vec![0]);
        let mut frontier: Vec<Vec<usize>> = found.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for n in &frontier {
                for c in &class_closures {
                    let join = self.closure(n.iter().chain(c).copied());
                    if found.insert(join.clone()) {
                        next.push(join);
                    }
                }
            }
            frontier = next;
        }
        Ok(self.sorted_subgroups(found))
    }

    /// The subgroup as a group in its own right; element `i` of the result is
    /// `sub.members()[i]` of `self`.
    pub fn subgroup_group(&self, sub: &Subgroup, name: impl Into<String>) -> FiniteGroup {
        let pos = |x: usize| sub.members.binary_search(&x).expect("closed subgroup");
        let table: Vec<Vec<usize>> = sub
            .members
            .iter()
            .map(|&a| sub.members.iter().map(|&b| pos(self.mul(a, b))).collect())
            .collect();
        let labels = sub.members.iter().map(|&x| self.label(x)).collect();
        FiniteGroup::from_table(name, &table, Some(labels), false).expect("subgroup table of a group")
    }

    /// G/N with cosets ordered by their smallest member, which is also the
    /// chosen representative (so the identity coset is represented by 0).
    pub fn quotient(&self, n: &Subgroup) -> Result<(FiniteGroup, Vec<usize>, Homomorphism)> {
        self.require_group()?;
        if !self.is_normal_set(&n.members) {
            return Err(Error::NotNormal);
        }
        let mut coset_of = vec![usize::MAX; self.order()];
        let mut reps = Vec::new();
        for g in self.elements() {
            if coset_of[g] == usize::MAX {
                let idx = reps.len();
                reps.push(g);
                for &m in &n.members {
                    coset_of[self.mul(g, m)] = idx;
                }
            }
        }
        let table: Vec<Vec<usize>> = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| coset_of[self.mul(a, b)]).collect())
            .collect();
        let labels = reps.iter().map(|&r| format!("{}N", self.label(r))).collect();
        let name = format!("{}/N{}", self.name(), n.order());
        let q = FiniteGroup::from_table(name, &table, Some(labels), false)?;
        let proj = Homomorphism::new(self.clone(), q.clone(), coset_of)?;
        Ok((q, reps, proj))
    }

    pub fn p_group_status(&self) -> PGroupStatus {
        match self.order() {
            1 => PGroupStatus::Trivial,
            n => match prime_factors(n as u64).as_slice() {
                [p] => PGroupStatus::Prime(*p),
                _ => PGroupStatus::NotPGroup,
            },
        }
    }

    /// A Sylow q-subgroup, grown greedily by adjoining the smallest element
    /// that keeps the subgroup a q-group.
    pub fn sylow_subgroup(&self, q: u64) -> Result<Subgroup> {
        self.require_group()?;
        let order = self.order() as u64;
        if !is_prime(q) || !order.is_multiple_of(q) {
            return Err(Error::PrimeDoesNotDivideOrder { prime: q, order: self.order() });
        }
        let mut target = 1;
        let mut rest = order;
        while rest.is_multiple_of(q) {
            rest /= q;
            target *= q;
        }
        let is_q_power = |mut k: u64| {
            while k.is_multiple_of(q) {
                k /= q;
            }
            k == 1
        };
        let mut current = vec![0];
        while (current.len() as u64) < target {
            let inside: HashSet<usize> = current.iter().copied().collect();
            current = self
                .elements()
                .filter(|g| !inside.contains(g))
                .map(|g| self.closure(current.iter().copied().chain([g])))
                .find(|c| is_q_power(c.len() as u64))
                .expect("a proper q-subgroup always extends inside its normalizer");
        }
        let normal = self.is_normal_set(&current);
        Ok(Subgroup { members: current, normal })
    }

    /// G = G_0 > G_1 > ... > G_k = 1 with every factor of order p; at each
    /// step the index-p normal subgroup with the smallest member list wins.
    pub fn composition_series_p(&self) -> Result<Vec<Subgroup>> {
        self.require_group()?;
        let p = match self.p_group_status() {
            PGroupStatus::Trivial => return Ok(vec![self.whole()]),
            PGroupStatus::Prime(p) => p as usize,
            PGroupStatus::NotPGroup => return Err(Error::NotPGroup),
        };
        let mut chain = vec![self.whole()];
        loop {
            let current = chain.last().unwrap().clone();
            if current.order() == 1 {
                break;
            }
            let sub = self.subgroup_group(&current, "G_i");
            let next = sub
                .normal_subgroups_bounded(usize::MAX)?
                .into_iter()
                .filter(|n| n.order() * p == sub.order())
                .map(|n| n.members.iter().map(|&i| current.members[i]).collect::<Vec<_>>())
                .min()
                .ok_or(Error::NotPGroup)?;
            let normal = self.is_normal_set(&next);
            chain.push(Subgroup { members: next, normal });
        }
        Ok(chain)
    }

    pub fn involutions(&self) -> Vec<usize> {
        self.elements().filter(|&x| x != 0 && self.mul(x, x) == 0).collect()
    }

    /// A smallest generating set of involutions (ties broken by the
    /// lexicographically first index set), or `None` if the involutions do
    /// not generate the group.
    pub fn involution_generators(&self) -> Result<Option<Vec<usize>>> {
        self.require_group()?;
        if self.order() == 1 {
            return Ok(Some(Vec::new()));
        }
        let invs = self.involutions();
        if self.closure(invs.iter().copied()).len() != self.order() {
            return Ok(None);
        }
        for k in 1..=invs.len() {
            if let Some(set) = invs
                .iter()
                .copied()
                .combinations(k)
                .find(|c| self.closure(c.iter().copied()).len() == self.order())
            {
                return Ok(Some(set));
            }
        }
        unreachable!("the full involution set generates")
    }
}

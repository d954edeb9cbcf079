//! Finite H-sets: a spinning group acting on switch positions.
//!
//! Action files:
//!
//! ```text
//! action <H-name> <m>
//! |H| lines of m space-separated images
//! ```
use crate::error::{Error, Result};
use crate::group::io::{content_lines, format_err, parse_indices};
use crate::group::{dihedral_perms, perm_group, symmetric_perms, FiniteGroup, Subgroup};
use std::collections::BTreeSet;

/// A left action of `group` on `0..omega_size`: `act[h1*h2][w] = act[h1][act[h2][w]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupAction {
    group: FiniteGroup,
    act: Vec<Vec<usize>>,
}

impl GroupAction {
    /// Validates the action laws and faithfulness. With `quotient_kernel`
    /// a non-faithful action is replaced by the induced action of H/kernel.
    pub fn new(group: FiniteGroup, act: Vec<Vec<usize>>, quotient_kernel: bool) -> Result<Self> {
        group.require_group()?;
        if act.len() != group.order() {
            return Err(Error::InvalidAction(format!("{} rows for a group of order {}", act.len(), group.order())));
        }
        let m = act.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(Error::InvalidAction("empty position set".into()));
        }
        for (h, row) in act.iter().enumerate() {
            if row.len() != m || !crate::group::perm::is_permutation(row) {
                return Err(Error::InvalidAction(format!("row {h} is not a permutation of {m} points")));
            }
        }
        if act[0].iter().enumerate().any(|(w, &x)| w != x) {
            return Err(Error::InvalidAction("identity does not act trivially".into()));
        }
        for a in group.elements() {
            for b in group.elements() {
                let ab = group.mul(a, b);
                if (0..m).any(|w| act[ab][w] != act[a][act[b][w]]) {
                    return Err(Error::InvalidAction(format!("action law fails for ({a}, {b})")));
                }
            }
        }
        let action = GroupAction { group, act };
        match action.kernel().iter().find(|&&h| h != 0) {
            None => Ok(action),
            Some(_) if quotient_kernel => action.faithful_quotient(),
            Some(&h) => Err(Error::NonFaithfulAction(h)),
        }
    }

    fn faithful_quotient(self) -> Result<Self> {
        let kernel = self.group.subgroup_from_members(&self.kernel())?;
        let (q, reps, _) = self.group.quotient(&kernel)?;
        let act = reps.iter().map(|&r| self.act[r].clone()).collect();
        GroupAction::new(q, act, false)
    }

    /// The group generated by the given permutations' closure must already be
    /// listed in full; the identity may appear anywhere and is moved first.
    pub fn from_permutations(name: impl Into<String>, mut perms: Vec<Vec<usize>>) -> Result<Self> {
        let pos = perms
            .iter()
            .position(|p| p.iter().enumerate().all(|(i, &x)| i == x))
            .ok_or_else(|| Error::InvalidAction("permutation list lacks the identity".into()))?;
        let id = perms.remove(pos);
        perms.insert(0, id);
        let (g, perms) = perm_group(name, perms).map_err(|e| Error::InvalidAction(e.to_string()))?;
        GroupAction::new(g, perms, false)
    }

    /// C_n on the vertices of an n-gon; element `i` sends position `w` to
    /// `w - i (mod n)`.
    pub fn rotation(n: usize) -> Result<Self> {
        if n == 1 {
            return Ok(GroupAction::trivial());
        }
        let g = FiniteGroup::cyclic(n)?.with_name(format!("C{n}"));
        let act = (0..n).map(|i| (0..n).map(|w| (w + n - i) % n).collect()).collect();
        GroupAction::new(g, act, false)
    }

    pub fn symmetric(n: usize) -> Result<Self> {
        let (g, perms) = perm_group(format!("S{n}"), symmetric_perms(n, false)?)?;
        GroupAction::new(g, perms, false)
    }

    pub fn alternating(n: usize) -> Result<Self> {
        let (g, perms) = perm_group(format!("A{n}"), symmetric_perms(n, true)?)?;
        // A_1 and A_2 are trivial; keep a single point
        if g.order() == 1 {
            return Ok(GroupAction::trivial());
        }
        GroupAction::new(g, perms, false)
    }

    /// D_{2n} on the n vertices of a polygon (regular action for n <= 2,
    /// where the vertex action is not faithful).
    pub fn dihedral(order: usize) -> Result<Self> {
        let (g, perms) = perm_group(format!("D{order}"), dihedral_perms(order)?)?;
        GroupAction::new(g, perms, false)
    }

    /// The trivial group on a single position.
    pub fn trivial() -> Self {
        GroupAction { group: FiniteGroup::trivial(), act: vec![vec![0]] }
    }

    /// Product action of A x B on positions `(a, b) -> a * m_B + b`.
    pub fn product(a: &GroupAction, b: &GroupAction) -> Result<Self> {
        let g = FiniteGroup::direct_product(&a.group, &b.group)?;
        let (ma, mb) = (a.omega_size(), b.omega_size());
        let nb = b.group.order();
        let act = g
            .elements()
            .map(|x| {
                let (xa, xb) = (x / nb, x % nb);
                (0..ma * mb).map(|w| a.act[xa][w / mb] * mb + b.act[xb][w % mb]).collect()
            })
            .collect();
        GroupAction::new(g, act, false)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn omega_size(&self) -> usize {
        self.act[0].len()
    }

    #[inline]
    pub fn image(&self, h: usize, w: usize) -> usize {
        self.act[h][w]
    }

    pub fn perm(&self, h: usize) -> &[usize] {
        &self.act[h]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.act
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.group
            .elements()
            .filter(|&h| self.act[h].iter().enumerate().all(|(w, &x)| w == x))
            .collect()
    }

    pub fn is_faithful(&self) -> bool {
        self.kernel().len() == 1
    }

    pub fn orbit(&self, sub: &Subgroup, w: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = sub.members().iter().map(|&h| self.act[h][w]).collect();
        set.into_iter().collect()
    }

    /// The action restricted to a subgroup (still faithful).
    pub fn restrict_to_subgroup(&self, sub: &Subgroup) -> Result<GroupAction> {
        let name = format!("{}<{}>", self.group.name(), sub.order());
        let g = self.group.subgroup_group(sub, name);
        let act = sub.members().iter().map(|&h| self.act[h].clone()).collect();
        GroupAction::new(g, act, false)
    }

    /// The permutation group induced by `sub` on the orbit of `w`, which acts
    /// faithfully on that orbit. Returns the action and the orbit (positions of
    /// the new action index into it).
    pub fn restrict_to_orbit(&self, sub: &Subgroup, w: usize) -> Result<(GroupAction, Vec<usize>)> {
        let orbit = self.orbit(sub, w);
        let local = |x: usize| orbit.binary_search(&x).expect("orbit is invariant");
        let mut perms: Vec<Vec<usize>> = sub
            .members()
            .iter()
            .map(|&h| orbit.iter().map(|&x| local(self.act[h][x])).collect())
            .collect();
        perms.sort();
        perms.dedup();
        let name = format!("{}<{}>|{}", self.group.name(), sub.order(), orbit.len());
        Ok((GroupAction::from_permutations(name, perms)?, orbit))
    }
}

pub fn parse_action(text: &str, group: Option<&FiniteGroup>) -> Result<GroupAction> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| format_err(1, "empty action file"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != "action" {
        return Err(format_err(hl, "expected `action <H-name> <m>`"));
    }
    let m: usize = parts[2].parse().map_err(|_| format_err(hl, "m is not a number"))?;
    let rows: Vec<Vec<usize>> = lines.map(|(ln, l)| parse_indices(ln, l, m)).collect::<Result<_>>()?;
    match group {
        Some(g) => {
            if rows.len() != g.order() {
                return Err(format_err(hl, format!("expected {} rows, found {}", g.order(), rows.len())));
            }
            GroupAction::new(g.clone(), rows, false)
        }
        None => GroupAction::from_permutations(parts[1], rows),
    }
}

pub fn write_action(a: &GroupAction) -> String {
    let mut out = format!("action {} {}\n", a.group.name().replace(' ', ""), a.omega_size());
    for row in &a.act {
        let r: Vec<String> = row.iter().map(usize::to_string).collect();
        out.push_str(&r.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_actions_are_faithful() {
        for a in [
            GroupAction::rotation(4).unwrap(),
            GroupAction::rotation(6).unwrap(),
            GroupAction::symmetric(3).unwrap(),
            GroupAction::alternating(4).unwrap(),
            GroupAction::dihedral(8).unwrap(),
            GroupAction::dihedral(4).unwrap(),
            GroupAction::trivial(),
            GroupAction::product(&GroupAction::rotation(2).unwrap(), &GroupAction::rotation(2).unwrap()).unwrap(),
        ] {
            assert!(a.is_faithful(), "{}", a.group().name());
        }
        assert_eq!(GroupAction::dihedral(8).unwrap().omega_size(), 4);
        assert_eq!(GroupAction::product(&GroupAction::rotation(2).unwrap(), &GroupAction::rotation(2).unwrap()).unwrap().omega_size(), 4);
    }

    #[test]
    fn non_faithful_rejected_or_quotiented() {
        // Z4 acting on 2 points through Z4 -> Z2
        let g = FiniteGroup::cyclic(4).unwrap();
        let act = vec![vec![0, 1], vec![1, 0], vec![0, 1], vec![1, 0]];
        assert_eq!(GroupAction::new(g.clone(), act.clone(), false).unwrap_err(), Error::NonFaithfulAction(2));
        let q = GroupAction::new(g, act, true).unwrap();
        assert_eq!(q.group().order(), 2);
        assert!(q.is_faithful());
    }

    #[test]
    fn action_law_checked() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let bad = vec![vec![0, 1, 2], vec![1, 2, 0], vec![1, 2, 0]];
        assert!(matches!(GroupAction::new(g, bad, false), Err(Error::InvalidAction(_))));
    }

    #[test]
    fn orbit_restriction_on_hexagon() {
        let c6 = GroupAction::rotation(6).unwrap();
        let c3 = c6.group().subgroup_generated(&[2]).unwrap();
        let (a, orbit) = c6.restrict_to_orbit(&c3, 0).unwrap();
        assert_eq!(orbit, vec![0, 2, 4]);
        assert_eq!(a.group().order(), 3);
        assert_eq!(a.omega_size(), 3);
    }

    #[test]
    fn file_round_trip() {
        let a = GroupAction::dihedral(8).unwrap();
        let text = write_action(&a);
        assert_eq!(parse_action(&text, Some(a.group())).unwrap(), a);
        let free = parse_action(&text, None).unwrap();
        assert_eq!(free.group().order(), 8);
        assert!(parse_action("action C2 2\n0 1\n", Some(&FiniteGroup::cyclic(2).unwrap())).is_err());
    }
}

use super::FiniteGroup;
use crate::error::{Error, Result};

/// A group homomorphism given by its table on the source elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: FiniteGroup,
    target: FiniteGroup,
    map: Vec<usize>,
    surjective: bool,
}

impl Homomorphism {
    /// Validates the homomorphism law on every pair.
    pub fn new(source: FiniteGroup, target: FiniteGroup, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::NotHomomorphism(format!(
                "map has {} entries for a source of order {}",
                map.len(),
                source.order()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= target.order()) {
            return Err(Error::NotHomomorphism(format!("image {bad} out of range")));
        }
        if map[0] != 0 {
            return Err(Error::NotHomomorphism("identity not preserved".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(Error::NotHomomorphism(format!("fails on ({a}, {b})")));
                }
            }
        }
        let mut hit = vec![false; target.order()];
        map.iter().for_each(|&y| hit[y] = true);
        let surjective = hit.iter().all(|&h| h);
        Ok(Homomorphism { source, target, map, surjective })
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        Homomorphism {
            source: g.clone(),
            target: g.clone(),
            map: g.elements().collect(),
            surjective: true,
        }
    }

    pub fn source(&self) -> &FiniteGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.source.elements().filter(|&x| self.map[x] == 0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z4_onto_z2() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let h = Homomorphism::new(z4, z2, vec![0, 1, 0, 1]).unwrap();
        assert!(h.is_surjective());
        assert_eq!(h.kernel(), vec![0, 2]);
    }

    #[test]
    fn rejects_non_homomorphism() {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert!(Homomorphism::new(z3, z2, vec![0, 1, 0]).is_err());
    }

    #[test]
    fn trivial_map_is_not_surjective() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let h = Homomorphism::new(z2.clone(), z2, vec![0, 0]).unwrap();
        assert!(!h.is_surjective());
    }
}

use std::fmt;

/// Dense membership bitmap over the state index space `0..universe`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    members: Vec<bool>,
}

impl StateSet {
    pub fn empty(universe: usize) -> Self {
        Self {
            members: vec![false; universe],
        }
    }

    pub fn full(universe: usize) -> Self {
        Self {
            members: vec![true; universe],
        }
    }

    /// Panics if an index is `>= universe`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> Self {
        let mut set = Self::empty(universe);
        for s in indices {
            set.insert(s);
        }
        set
    }

    pub fn from_predicate(universe: usize, pred: impl Fn(usize) -> bool) -> Self {
        Self {
            members: (0..universe).map(pred).collect(),
        }
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, s: usize) -> bool {
        self.members.get(s).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, s: usize) -> bool {
        let was = self.members[s];
        self.members[s] = true;
        !was
    }

    pub fn remove(&mut self, s: usize) -> bool {
        let was = self.members[s];
        self.members[s] = false;
        was
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(s, &b)| b.then_some(s))
    }

    pub fn complement(&self) -> Self {
        Self {
            members: self.members.iter().map(|b| !b).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(&a, &b)| !a || b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        assert_eq!(
            self.universe(),
            other.universe(),
            "state sets over different universes"
        );
        Self {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

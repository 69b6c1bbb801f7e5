//! Cyclic port orders, compared up to rotation and reflection.

/// Counterclockwise cyclic order of a gadget's locations (by index).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanarEmbedding {
    cycle: Vec<usize>,
}

impl PlanarEmbedding {
    pub fn new(cycle: Vec<usize>) -> Self {
        PlanarEmbedding { cycle }
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    pub fn rotate(&self, k: usize) -> Self {
        let mut cycle = self.cycle.clone();
        if !cycle.is_empty() {
            let k = k % cycle.len();
            cycle.rotate_left(k);
        }
        PlanarEmbedding { cycle }
    }

    pub fn reflect(&self) -> Self {
        let mut cycle = self.cycle.clone();
        cycle.reverse();
        PlanarEmbedding { cycle }
    }

    /// Position of each location in the cycle.
    pub fn positions(&self, n_locations: usize) -> Vec<usize> {
        let mut pos = vec![usize::MAX; n_locations];
        for (i, &l) in self.cycle.iter().enumerate() {
            pos[l] = i;
        }
        pos
    }
}

/// Every rotation of `seq` and of its reversal.
pub fn dihedral_variants<T: Clone>(seq: &[T]) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(2 * seq.len());
    let mut rev = seq.to_vec();
    rev.reverse();
    for base in [seq.to_vec(), rev] {
        for k in 0..base.len().max(1) {
            let mut v = base.clone();
            if !v.is_empty() {
                v.rotate_left(k);
            }
            out.push(v);
        }
    }
    out
}

/// Lexicographically least sequence among all rotations and reflections.
pub fn canonical_cycle<T: Clone + Ord>(seq: &[T]) -> Vec<T> {
    dihedral_variants(seq).into_iter().min().unwrap_or_default()
}

/// Canonical string of a cyclic sequence of names, `|`-separated.
pub fn canonical_embedding<S: AsRef<str>>(cycle: &[S]) -> String {
    let names: Vec<&str> = cycle.iter().map(|s| s.as_ref()).collect();
    canonical_cycle(&names).join("|")
}

/// True if two cyclic orders agree up to rotation and reflection.
pub fn equivalent_cycles<T: Clone + Ord>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && canonical_cycle(a) == canonical_cycle(b)
}

//! Union-find and the variable graph Γ(Φ): one vertex per variable, one
//! edge per clause, signs ignored. Component sizes dominate implication
//! sub-formula sizes.

use crate::cnf::Formula;

/// Disjoint sets over `0..len` with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len as u32).collect(),
            size: vec![1; len],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            self.parent[x as usize] = self.parent[self.parent[x as usize] as usize];
            x = self.parent[x as usize];
        }
        x
    }

    /// Returns false if the two elements were already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    pub fn size_of(&mut self, x: u32) -> u32 {
        let root = self.find(x);
        self.size[root as usize]
    }
}

/// Connected components of Γ(Φ) with a compact id per variable.
#[derive(Clone, Debug)]
pub struct VariableComponents {
    component: Vec<u32>,
    sizes: Vec<u32>,
}

impl VariableComponents {
    /// Component id of a 1-based variable.
    pub fn component_of(&self, variable: u32) -> u32 {
        self.component[variable as usize - 1]
    }

    /// Size of the component containing a 1-based variable.
    pub fn size_of(&self, variable: u32) -> u32 {
        self.sizes[self.component_of(variable) as usize]
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn num_components(&self) -> usize {
        self.sizes.len()
    }

    pub fn max_size(&self) -> u32 {
        self.sizes.iter().copied().max().unwrap_or(0)
    }
}

/// Union the two variables of every clause.
pub fn variable_graph_components(formula: &Formula) -> VariableComponents {
    let n = formula.num_variables() as usize;
    let mut uf = UnionFind::new(n);
    for clause in formula.clauses() {
        let (a, b) = clause.variables();
        uf.union(a - 1, b - 1);
    }
    let mut component = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    for v in 0..n as u32 {
        let root = uf.find(v) as usize;
        if component[root] == u32::MAX {
            component[root] = sizes.len() as u32;
            sizes.push(uf.size[root]);
        }
        component[v as usize] = component[root];
    }
    VariableComponents { component, sizes }
}

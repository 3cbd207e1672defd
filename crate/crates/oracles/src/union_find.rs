use std::collections::{BTreeMap, BTreeSet};

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Components of the graph spanned by `edges`; isolated nodes are omitted.
pub fn components(edges: &[(String, String)]) -> BTreeSet<BTreeSet<String>> {
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (a, b) in edges {
        for n in [a, b] {
            let next = index.len();
            index.entry(n).or_insert(next);
        }
    }
    let mut dsu = Dsu {
        parent: (0..index.len()).collect(),
    };
    for (a, b) in edges {
        dsu.union(index[a.as_str()], index[b.as_str()]);
    }
    let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (name, i) in &index {
        let root = dsu.find(*i);
        groups.entry(root).or_default().insert(name.to_string());
    }
    groups.into_values().collect()
}

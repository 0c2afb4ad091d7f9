//! Set-cover instance generator: encodes "cover X with at most `ell` sets"
//! as a shared-edges instance with budget `ell`.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graph::Instance;
use crate::reductions::gadget::GadgetBuilder;

/// A set-cover question: elements `0..universe`, a family of subsets, and a
/// maximum number of sets to pick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCover {
    pub universe: usize,
    pub family: Vec<BTreeSet<usize>>,
    pub ell: u64,
}

impl SetCover {
    pub fn degree(&self, element: usize) -> usize {
        self.family
            .iter()
            .filter(|set| set.contains(&element))
            .count()
    }
}

/// Exhaustive decision: is some subfamily of size at most `ell` a cover?
pub fn brute_force_set_cover(sc: &SetCover) -> bool {
    let all: BTreeSet<usize> = (0..sc.universe).collect();
    let limit = (sc.ell as usize).min(sc.family.len());
    for size in 0..=limit {
        for combo in (0..sc.family.len()).combinations(size) {
            let mut covered = BTreeSet::new();
            for &j in &combo {
                covered.extend(sc.family[j].iter().copied());
            }
            if covered == all {
                return true;
            }
        }
    }
    false
}

/// Number of routes the generated instance asks for.
pub fn expected_routes(sc: &SetCover) -> usize {
    sc.family.len() + (0..sc.universe).map(|x| sc.degree(x)).sum::<usize>()
}

/// Builds the instance: one element vertex per element, one set vertex per
/// set, one membership vertex per (element, set) incidence, and one spill
/// vertex per element, wired with `(ell+1)`-chains so that only the set-to-
/// sink unit edges can be shared. The answer is "yes with `ell` shared
/// edges" exactly when the set-cover question is a yes.
pub fn setcover_to_mse(sc: &SetCover) -> Result<Instance> {
    for set in &sc.family {
        if let Some(&x) = set.iter().find(|&&x| x >= sc.universe) {
            return Err(Error::MalformedFamily(format!(
                "set member {x} outside universe"
            )));
        }
    }
    for x in 0..sc.universe {
        if sc.degree(x) == 0 {
            return Err(Error::MalformedFamily(format!(
                "element {x} is in no set; the instance has no cover"
            )));
        }
    }
    let chain = sc.ell + 1;
    let mut b = GadgetBuilder::new();
    let s = b.add_anchor("s");
    let t = b.add_anchor("t");
    let elem: Vec<_> = (0..sc.universe)
        .map(|i| b.add_anchor(format!("elem:{i}")))
        .collect();
    let set: Vec<_> = (0..sc.family.len())
        .map(|j| b.add_anchor(format!("set:{j}")))
        .collect();
    let spill: Vec<_> = (0..sc.universe)
        .map(|i| b.add_anchor(format!("spill:{i}")))
        .collect();
    for (j, members) in sc.family.iter().enumerate() {
        for &i in members {
            let d = b.add_anchor(format!("member:{i},{j}"));
            b.add_chain(d, elem[i], chain);
            b.add_chain(d, spill[i], chain);
            b.add_chain(d, set[j], chain);
        }
    }
    for &w in &set {
        b.add_chain(s, w, chain);
    }
    for (i, &v) in elem.iter().enumerate() {
        b.add_bundle(s, v, sc.degree(i) as u64, chain);
    }
    for &w in &set {
        b.add_chain(w, t, 1); // the only shareable edges
    }
    for (i, &ti) in spill.iter().enumerate() {
        b.add_bundle(ti, t, sc.degree(i) as u64 - 1, chain);
    }
    let p = expected_routes(sc);
    Instance::new(b.graph.build(), s, t, p, sc.ell)
}

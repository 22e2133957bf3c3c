//! Finite groups presented by multiplication tables, their subgroup lattices,
//! and G-lattices: free abelian groups with an action by unimodular integer
//! matrices. Groups are capped at order 64, which keeps subgroup enumeration
//! and relation verification brute-force.

use crate::exactlin::{kernel_basis, solve_in_basis, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

pub const GROUP_ORDER_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupError {
    NotAGroup(String),
    OrderCapExceeded { order: usize },
    NotASubgroup,
    GroupMismatch,
    RankMismatch,
    NotUnimodular { generator: String },
    RelationViolated { word: String },
    NotEquivariant { generator: String },
    InvalidPartition(String),
    InvalidModule(String),
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::NotAGroup(why) => write!(f, "multiplication table is not a group: {}", why),
            GroupError::OrderCapExceeded { order } => {
                write!(
                    f,
                    "group order {} exceeds the cap of {}",
                    order, GROUP_ORDER_CAP
                )
            }
            GroupError::NotASubgroup => write!(f, "element set is not a subgroup"),
            GroupError::GroupMismatch => write!(f, "lattices are defined over different groups"),
            GroupError::RankMismatch => write!(f, "matrix dimensions do not match the rank"),
            GroupError::NotUnimodular { generator } => {
                write!(f, "action matrix for {} is not unimodular", generator)
            }
            GroupError::RelationViolated { word } => {
                write!(
                    f,
                    "action matrices violate the group relation at word {}",
                    word
                )
            }
            GroupError::NotEquivariant { generator } => {
                write!(f, "map does not commute with the action of {}", generator)
            }
            GroupError::InvalidPartition(why) => write!(f, "invalid basis partition: {}", why),
            GroupError::InvalidModule(why) => write!(f, "invalid finite module: {}", why),
        }
    }
}

impl std::error::Error for GroupError {}

/// A subgroup, stored as the sorted list of element indices.
pub type Subgroup = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub index: usize,
}

/// Finite group given by its full multiplication table. The table is
/// verified to be a group law on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
    generators: Vec<Generator>,
}

impl FiniteGroup {
    pub fn from_table(
        order: usize,
        table: Vec<usize>,
        generators: Vec<Generator>,
    ) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::NotAGroup("empty table".into()));
        }
        if order > GROUP_ORDER_CAP {
            return Err(GroupError::OrderCapExceeded { order });
        }
        if table.len() != order * order {
            return Err(GroupError::NotAGroup("table size mismatch".into()));
        }
        if table.iter().any(|&x| x >= order) {
            return Err(GroupError::NotAGroup("entry out of range".into()));
        }
        let mul = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul(e, g) == g && mul(g, e) == g))
            .ok_or_else(|| GroupError::NotAGroup("no identity".into()))?;
        let mut inv = vec![usize::MAX; order];
        for (g, slot) in inv.iter_mut().enumerate() {
            *slot = (0..order)
                .find(|&h| mul(g, h) == identity && mul(h, g) == identity)
                .ok_or_else(|| GroupError::NotAGroup(format!("element {} has no inverse", g)))?;
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(GroupError::NotAGroup(format!(
                            "associativity fails at ({}, {}, {})",
                            a, b, c
                        )));
                    }
                }
            }
        }
        let group = FiniteGroup {
            order,
            mul: table,
            inv,
            identity,
            generators,
        };
        let gen_indices: Vec<usize> = group.generators.iter().map(|g| g.index).collect();
        if gen_indices.iter().any(|&i| i >= order) {
            return Err(GroupError::NotAGroup("generator index out of range".into()));
        }
        if group.closure(&gen_indices).len() != order {
            return Err(GroupError::NotAGroup("generators do not generate".into()));
        }
        Ok(group)
    }

    /// Direct product of cyclic groups `C_{f_1} x ... x C_{f_k}` with one
    /// canonical generator per factor. Elements are tuples indexed
    /// lexicographically, last coordinate fastest.
    pub fn abelian_from_invariants(factors: &[usize]) -> Result<Self, GroupError> {
        Self::abelian_with_names(
            &factors
                .iter()
                .enumerate()
                .map(|(i, &f)| (format!("g{}", i), f))
                .collect::<Vec<_>>(),
        )
    }

    pub fn abelian_with_names(factors: &[(String, usize)]) -> Result<Self, GroupError> {
        assert!(factors.iter().all(|&(_, f)| f >= 1), "factors must be >= 1");
        let order: usize = factors.iter().map(|&(_, f)| f).product();
        if order > GROUP_ORDER_CAP {
            return Err(GroupError::OrderCapExceeded { order });
        }
        let k = factors.len();
        let decode = |mut idx: usize| -> Vec<usize> {
            let mut t = vec![0; k];
            for i in (0..k).rev() {
                t[i] = idx % factors[i].1;
                idx /= factors[i].1;
            }
            t
        };
        let encode = |t: &[usize]| -> usize {
            t.iter()
                .zip(factors)
                .fold(0, |acc, (&x, &(_, f))| acc * f + x)
        };
        let mut table = vec![0usize; order * order];
        for a in 0..order {
            let ta = decode(a);
            for b in 0..order {
                let tb = decode(b);
                let sum: Vec<usize> = ta
                    .iter()
                    .zip(&tb)
                    .zip(factors)
                    .map(|((&x, &y), &(_, f))| (x + y) % f)
                    .collect();
                table[a * order + b] = encode(&sum);
            }
        }
        let generators = factors
            .iter()
            .enumerate()
            .map(|(i, (name, _))| {
                let mut t = vec![0; k];
                t[i] = if factors[i].1 > 1 { 1 } else { 0 };
                Generator {
                    name: name.clone(),
                    index: encode(&t),
                }
            })
            .collect();
        Self::from_table(order, table, generators)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn table(&self) -> &[usize] {
        &self.mul
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != self.identity {
            x = self.op(x, g);
            n += 1;
        }
        n
    }

    fn closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut in_set = vec![false; self.order];
        in_set[self.identity] = true;
        let mut stack: Vec<usize> = vec![self.identity];
        for &s in seed {
            if !in_set[s] {
                in_set[s] = true;
                stack.push(s);
            }
        }
        while let Some(g) = stack.pop() {
            for &s in seed {
                let h = self.op(g, s);
                if !in_set[h] {
                    in_set[h] = true;
                    stack.push(h);
                }
            }
        }
        (0..self.order).filter(|&g| in_set[g]).collect()
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        if set.is_empty() || !set.contains(&self.identity) {
            return false;
        }
        set.iter().all(|&a| {
            set.iter()
                .all(|&b| set.binary_search(&self.op(a, b)).is_ok())
        })
    }

    /// All subgroups, ordered by size then lexicographically by element set.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let mut found: Vec<Subgroup> = vec![vec![self.identity]];
        let mut frontier: Vec<Subgroup> = found.clone();
        while let Some(h) = frontier.pop() {
            for g in 0..self.order {
                if h.binary_search(&g).is_ok() {
                    continue;
                }
                let mut seed = h.clone();
                seed.push(g);
                let closed = self.closure(&seed);
                if !found.contains(&closed) {
                    found.push(closed.clone());
                    frontier.push(closed);
                }
            }
        }
        found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        found
    }

    /// Greedy deterministic generating set for a subgroup.
    pub fn subgroup_generators(&self, h: &Subgroup) -> Vec<usize> {
        let mut gens: Vec<usize> = Vec::new();
        let mut reached = vec![self.identity];
        for &g in h {
            if reached.binary_search(&g).is_ok() {
                continue;
            }
            gens.push(g);
            reached = self.closure(&gens);
        }
        gens
    }

    /// A subgroup as a standalone group, together with the embedding of its
    /// element indices back into this group.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
        if !self.is_subgroup(h) {
            return Err(GroupError::NotASubgroup);
        }
        let n = h.len();
        let pos = |g: usize| h.binary_search(&g).expect("closed subgroup");
        let mut table = vec![0usize; n * n];
        for (i, &a) in h.iter().enumerate() {
            for (j, &b) in h.iter().enumerate() {
                table[i * n + j] = pos(self.op(a, b));
            }
        }
        let generators = self
            .subgroup_generators(h)
            .into_iter()
            .enumerate()
            .map(|(i, g)| Generator {
                name: format!("h{}", i),
                index: pos(g),
            })
            .collect();
        let group = FiniteGroup::from_table(n, table, generators)?;
        Ok((group, h.clone()))
    }

    /// Left cosets of `h`, each sorted, ordered by minimal element.
    pub fn left_cosets(&self, h: &Subgroup) -> Result<Vec<Vec<usize>>, GroupError> {
        if !self.is_subgroup(h) {
            return Err(GroupError::NotASubgroup);
        }
        let mut seen = vec![false; self.order];
        let mut cosets = Vec::new();
        for g in 0..self.order {
            if seen[g] {
                continue;
            }
            let mut coset: Vec<usize> = h.iter().map(|&x| self.op(g, x)).collect();
            coset.sort_unstable();
            for &c in &coset {
                seen[c] = true;
            }
            cosets.push(coset);
        }
        cosets.sort_by_key(|c| c[0]);
        Ok(cosets)
    }
}

/// Free abelian group of finite rank with a verified action of a finite
/// group by unimodular matrices. The full element-to-matrix table is cached
/// at construction; building it is also what verifies every relation of the
/// multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GLattice {
    group: Arc<FiniteGroup>,
    rank: usize,
    generator_action: Vec<IntMatrix>,
    element_action: Vec<IntMatrix>,
    labels: Option<Vec<String>>,
}

impl GLattice {
    pub fn new(
        group: Arc<FiniteGroup>,
        generator_action: Vec<IntMatrix>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        let gens = group.generators();
        if generator_action.len() != gens.len() {
            return Err(GroupError::RankMismatch);
        }
        let rank = generator_action.first().map(|m| m.rows()).unwrap_or(0);
        for (g, m) in gens.iter().zip(&generator_action) {
            if m.rows() != rank || m.cols() != rank {
                return Err(GroupError::RankMismatch);
            }
            if rank > 0 && !m.det().abs().is_one() {
                return Err(GroupError::NotUnimodular {
                    generator: g.name.clone(),
                });
            }
        }
        if let Some(ls) = &labels {
            if ls.len() != rank {
                return Err(GroupError::RankMismatch);
            }
        }
        // propagate matrices over the Cayley graph; any revisit must agree,
        // which checks every relation of the table
        let order = group.order();
        let mut element_action: Vec<Option<IntMatrix>> = vec![None; order];
        element_action[group.identity()] = Some(IntMatrix::identity(rank));
        let mut queue = vec![group.identity()];
        while let Some(e) = queue.pop() {
            let me = element_action[e].clone().expect("visited");
            for (g, mg) in gens.iter().zip(&generator_action) {
                let target = group.op(g.index, e);
                let prod = mg.mul(&me);
                match &element_action[target] {
                    None => {
                        element_action[target] = Some(prod);
                        queue.push(target);
                    }
                    Some(existing) => {
                        if *existing != prod {
                            return Err(GroupError::RelationViolated {
                                word: format!("{}*[{}]", g.name, target),
                            });
                        }
                    }
                }
            }
        }
        let element_action: Vec<IntMatrix> = element_action
            .into_iter()
            .map(|m| m.expect("generators generate the group"))
            .collect();
        // consistency sweep over the full table
        for a in 0..order {
            for gen in gens {
                let prod = element_action[gen.index].mul(&element_action[a]);
                if prod != element_action[group.op(gen.index, a)] {
                    return Err(GroupError::RelationViolated {
                        word: format!("[{}]*[{}]", gen.index, a),
                    });
                }
            }
        }
        Ok(GLattice {
            group,
            rank,
            generator_action,
            element_action,
            labels,
        })
    }

    /// Rank-n lattice with every generator acting as the identity.
    pub fn trivial(group: Arc<FiniteGroup>, rank: usize) -> Self {
        let action = vec![IntMatrix::identity(rank); group.generators().len()];
        GLattice::new(group, action, None).expect("trivial action is valid")
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn generator_action(&self) -> &[IntMatrix] {
        &self.generator_action
    }

    /// Action matrix of an arbitrary group element.
    pub fn action_of(&self, element: usize) -> &IntMatrix {
        &self.element_action[element]
    }

    /// Permutation module `Z[G/H]` with the left-multiplication action on
    /// cosets; rank is the index of `H`.
    pub fn permutation_module(group: Arc<FiniteGroup>, h: &Subgroup) -> Result<Self, GroupError> {
        let cosets = group.left_cosets(h)?;
        let n = cosets.len();
        let coset_of = |g: usize| {
            cosets
                .iter()
                .position(|c| c.binary_search(&g).is_ok())
                .unwrap()
        };
        let mut action = Vec::new();
        for gen in group.generators() {
            let mut m = IntMatrix::zero(n, n);
            for (j, coset) in cosets.iter().enumerate() {
                let image = coset_of(group.op(gen.index, coset[0]));
                m.set(image, j, BigInt::one());
            }
            action.push(m);
        }
        GLattice::new(group, action, None)
    }

    /// Dual lattice: `g` acts by the inverse-transpose.
    pub fn dual(&self) -> GLattice {
        let action = self
            .group
            .generators()
            .iter()
            .map(|g| self.element_action[self.group.inverse(g.index)].transpose())
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|ls| ls.iter().map(|l| format!("{}*", l)).collect());
        GLattice::new(self.group.clone(), action, labels).expect("dual of a valid action")
    }

    /// The same underlying lattice viewed as a module over a subgroup.
    pub fn restrict(&self, h: &Subgroup) -> Result<GLattice, GroupError> {
        let (sub, embedding) = self.group.subgroup_as_group(h)?;
        let action = sub
            .generators()
            .iter()
            .map(|g| self.element_action[embedding[g.index]].clone())
            .collect();
        GLattice::new(Arc::new(sub), action, self.labels.clone())
    }

    /// Primitive basis of the fixed sublattice `X^H`, as columns.
    pub fn invariants_sublattice(&self, h: &Subgroup) -> IntMatrix {
        let gens = self.group.subgroup_generators(h);
        if gens.is_empty() || self.rank == 0 {
            return IntMatrix::identity(self.rank);
        }
        let id = IntMatrix::identity(self.rank);
        let stacked: Vec<IntMatrix> = gens
            .iter()
            .map(|&g| self.element_action[g].sub(&id))
            .collect();
        let refs: Vec<&IntMatrix> = stacked.iter().collect();
        kernel_basis(&IntMatrix::vstack(&refs))
    }

    pub fn direct_sum(&self, other: &GLattice) -> Result<GLattice, GroupError> {
        if self.group != other.group {
            return Err(GroupError::GroupMismatch);
        }
        let action = self
            .generator_action
            .iter()
            .zip(&other.generator_action)
            .map(|(a, b)| IntMatrix::block_diag(&[a, b]))
            .collect();
        let labels = match (&self.labels, &other.labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        GLattice::new(self.group.clone(), action, labels)
    }

    /// The action of one generator written against the basis labels, one
    /// line per basis vector, e.g. "sigma·a = a + tau.b - b".
    pub fn describe_action(&self, generator: usize) -> Vec<String> {
        let fallback: Vec<String> = (0..self.rank).map(|i| format!("e{}", i)).collect();
        let labels: Vec<&str> = match &self.labels {
            Some(ls) => ls.iter().map(String::as_str).collect(),
            None => fallback.iter().map(String::as_str).collect(),
        };
        let gen = &self.group.generators()[generator];
        let m = &self.generator_action[generator];
        (0..self.rank)
            .map(|j| {
                let mut terms = Vec::new();
                for (i, label) in labels.iter().enumerate() {
                    let c = m.at(i, j);
                    if c.is_zero() {
                        continue;
                    }
                    let body = if c.abs().is_one() {
                        label.to_string()
                    } else {
                        format!("{}·{}", c.abs(), label)
                    };
                    if c.is_negative() {
                        terms.push(format!("- {}", body));
                    } else if terms.is_empty() {
                        terms.push(body);
                    } else {
                        terms.push(format!("+ {}", body));
                    }
                }
                let rhs = if terms.is_empty() {
                    "0".to_string()
                } else {
                    terms.join(" ")
                };
                format!("{}·{} = {}", gen.name, labels[j], rhs)
            })
            .collect()
    }

    /// Change of basis: the action conjugated by a unimodular `P`
    /// (columns of `P` are the new basis, action becomes `P^{-1} A P`).
    pub fn change_basis(&self, p: &IntMatrix) -> Result<GLattice, GroupError> {
        if p.rows() != self.rank || p.cols() != self.rank {
            return Err(GroupError::RankMismatch);
        }
        let pinv = crate::exactlin::inverse_unimodular(p);
        let action = self
            .generator_action
            .iter()
            .map(|a| pinv.mul(a).mul(p))
            .collect();
        GLattice::new(self.group.clone(), action, None)
    }
}

/// Basis partition for [`ind_copies`]: the replicated block is duplicated
/// `k` times, the fixed block is shared between copies. The action must map
/// the fixed block into itself.
#[derive(Clone, Debug)]
pub struct IndRoles {
    pub replicated: Vec<usize>,
    pub fixed: Vec<usize>,
}

/// The module obtained by replacing the replicated basis block of `x` with
/// `k` independent copies, all interacting with the shared fixed block in
/// the same way the original block did.
pub fn ind_copies(x: &GLattice, roles: &IndRoles, k: usize) -> Result<GLattice, GroupError> {
    if k == 0 {
        return Err(GroupError::InvalidPartition("k must be >= 1".into()));
    }
    let n = x.rank();
    let mut seen = vec![false; n];
    for &i in roles.replicated.iter().chain(&roles.fixed) {
        if i >= n {
            return Err(GroupError::InvalidPartition(format!(
                "index {} out of range",
                i
            )));
        }
        if seen[i] {
            return Err(GroupError::InvalidPartition(format!(
                "index {} listed twice",
                i
            )));
        }
        seen[i] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(GroupError::InvalidPartition(
            "partition does not cover the basis".into(),
        ));
    }
    let r = roles.replicated.len();
    for m in x.generator_action() {
        for &j in &roles.fixed {
            for &i in &roles.replicated {
                if !m.at(i, j).is_zero() {
                    return Err(GroupError::InvalidPartition(
                        "fixed block is not action-stable".into(),
                    ));
                }
            }
        }
    }
    let new_rank = k * r + roles.fixed.len();
    // new basis order: copy 0 of the replicated block, copy 1, ..., then fixed
    let mut action = Vec::new();
    for m in x.generator_action() {
        let mut out = IntMatrix::zero(new_rank, new_rank);
        for copy in 0..k {
            for (jj, &j) in roles.replicated.iter().enumerate() {
                for (ii, &i) in roles.replicated.iter().enumerate() {
                    out.set(copy * r + ii, copy * r + jj, m.at(i, j).clone());
                }
                for (ii, &i) in roles.fixed.iter().enumerate() {
                    out.set(k * r + ii, copy * r + jj, m.at(i, j).clone());
                }
            }
        }
        for (jj, &j) in roles.fixed.iter().enumerate() {
            for (ii, &i) in roles.fixed.iter().enumerate() {
                out.set(k * r + ii, k * r + jj, m.at(i, j).clone());
            }
        }
        action.push(out);
    }
    let labels = x.labels().map(|ls| {
        let mut out = Vec::new();
        for copy in 0..k {
            for &j in &roles.replicated {
                out.push(if k == 1 {
                    ls[j].clone()
                } else {
                    format!("{}#{}", ls[j], copy + 1)
                });
            }
        }
        for &j in &roles.fixed {
            out.push(ls[j].clone());
        }
        out
    });
    GLattice::new(x.group().clone(), action, labels)
}

/// Equivariant map of G-lattices; `matrix` columns are images of the source
/// basis. Equivariance is verified on construction.
#[derive(Clone, Debug)]
pub struct GLatticeMap {
    pub source: GLattice,
    pub target: GLattice,
    pub matrix: IntMatrix,
}

impl GLatticeMap {
    pub fn new(source: GLattice, target: GLattice, matrix: IntMatrix) -> Result<Self, GroupError> {
        if source.group() != target.group() {
            return Err(GroupError::GroupMismatch);
        }
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(GroupError::RankMismatch);
        }
        for gen in source.group().generators() {
            let lhs = matrix.mul(source.action_of(gen.index));
            let rhs = target.action_of(gen.index).mul(&matrix);
            if lhs != rhs {
                return Err(GroupError::NotEquivariant {
                    generator: gen.name.clone(),
                });
            }
        }
        Ok(GLatticeMap {
            source,
            target,
            matrix,
        })
    }
}

/// Finite abelian group with a G-action: invariant factors `n_1 | ... | n_k`
/// and generator matrices taken modulo the factors (entry (i, j) is read
/// modulo `n_i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGModule {
    group: Arc<FiniteGroup>,
    factors: Vec<BigInt>,
    generator_action: Vec<IntMatrix>,
    element_action: Vec<IntMatrix>,
}

impl FiniteGModule {
    pub fn new(
        group: Arc<FiniteGroup>,
        factors: Vec<BigInt>,
        generator_action: Vec<IntMatrix>,
    ) -> Result<Self, GroupError> {
        if factors.iter().any(|n| *n < BigInt::from(2)) {
            return Err(GroupError::InvalidModule("factors must be >= 2".into()));
        }
        for w in factors.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return Err(GroupError::InvalidModule(
                    "factors must form a chain".into(),
                ));
            }
        }
        let k = factors.len();
        if generator_action.len() != group.generators().len() {
            return Err(GroupError::InvalidModule("one matrix per generator".into()));
        }
        if generator_action
            .iter()
            .any(|m| m.rows() != k || m.cols() != k)
        {
            return Err(GroupError::InvalidModule(
                "matrix size must match factor count".into(),
            ));
        }
        let reduce = |m: &IntMatrix| -> IntMatrix {
            let mut out = IntMatrix::zero(k, k);
            for (i, n_i) in factors.iter().enumerate() {
                for j in 0..k {
                    out.set(i, j, m.at(i, j).mod_floor(n_i));
                }
            }
            out
        };
        let generator_action: Vec<IntMatrix> = generator_action.iter().map(&reduce).collect();
        // structure: entry (i,j) must kill the order of the j-th generator
        for m in &generator_action {
            for i in 0..k {
                for j in 0..k {
                    if !((m.at(i, j) * &factors[j]).mod_floor(&factors[i])).is_zero() {
                        return Err(GroupError::InvalidModule(format!(
                            "entry ({}, {}) does not respect the factor structure",
                            i, j
                        )));
                    }
                }
            }
        }
        // relations over the table, with reduction; cache the element table
        let order = group.order();
        let mut elt: Vec<Option<IntMatrix>> = vec![None; order];
        elt[group.identity()] = Some(reduce(&IntMatrix::identity(k)));
        let mut queue = vec![group.identity()];
        while let Some(e) = queue.pop() {
            let me = elt[e].clone().unwrap();
            for (g, mg) in group.generators().iter().zip(&generator_action) {
                let target = group.op(g.index, e);
                let prod = reduce(&mg.mul(&me));
                match &elt[target] {
                    None => {
                        elt[target] = Some(prod);
                        queue.push(target);
                    }
                    Some(existing) => {
                        if *existing != prod {
                            return Err(GroupError::RelationViolated {
                                word: format!("{}*[{}]", g.name, target),
                            });
                        }
                    }
                }
            }
        }
        let element_action = elt.into_iter().map(|m| m.expect("generated")).collect();
        Ok(FiniteGModule {
            group,
            factors,
            generator_action,
            element_action,
        })
    }

    pub fn cyclic(
        group: Arc<FiniteGroup>,
        n: u64,
        unit_per_generator: &[i64],
    ) -> Result<Self, GroupError> {
        let action = unit_per_generator
            .iter()
            .map(|&u| IntMatrix::from_i64(1, 1, &[u]))
            .collect();
        Self::new(group, vec![BigInt::from(n)], action)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn element_action(&self, e: usize) -> &IntMatrix {
        &self.element_action[e]
    }
}

/// Result of embedding a finite G-module into a permutation lattice via the
/// quasitrivial-cover construction, the character-level form of
/// `1 -> A -> P -> T -> 1`.
pub struct QuasitrivialCover {
    /// Direct sum of permutation modules, one block per canonical generator.
    pub p: GLattice,
    /// Surjection `X(P) -> X(A)` in coordinates (rows = factors of A).
    pub projection: IntMatrix,
    /// Kernel lattice of the projection, with the induced action.
    pub xt: GLattice,
    /// Inclusion of `xt` into the standard basis of `p`.
    pub inclusion: IntMatrix,
}

/// Embeds a finite G-module into a sum of permutation modules through its
/// canonical invariant-factor generators, and returns the kernel lattice.
pub fn quasitrivial_cover(a: &FiniteGModule) -> Result<QuasitrivialCover, GroupError> {
    let group = a.group().clone();
    let k = a.factors().len();
    let order = group.order();
    // stabilizer of each canonical generator e_i, then its coset space
    let mut blocks: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut parts: Vec<GLattice> = Vec::new();
    for i in 0..k {
        let mut stab: Vec<usize> = (0..order)
            .filter(|&g| {
                let m = a.element_action(g);
                (0..k).all(|r| {
                    let expected = if r == i {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    };
                    (m.at(r, i) - expected).mod_floor(&a.factors()[r]).is_zero()
                })
            })
            .collect();
        stab.sort_unstable();
        parts.push(GLattice::permutation_module(group.clone(), &stab)?);
        blocks.push(group.left_cosets(&stab)?);
    }
    let p = parts.iter().skip(1).fold(parts[0].clone(), |acc, x| {
        acc.direct_sum(x).expect("same group")
    });
    // projection: coset g*Stab_i of block i maps to g . e_i in A
    let n = p.rank();
    let mut projection = IntMatrix::zero(k, n);
    let mut off = 0;
    for (i, cosets) in blocks.iter().enumerate() {
        for (j, coset) in cosets.iter().enumerate() {
            let m = a.element_action(coset[0]);
            for r in 0..k {
                projection.set(r, off + j, m.at(r, i).clone());
            }
        }
        off += cosets.len();
    }
    // kernel of Z^n -> ⊕ Z/n_i, read off from the kernel of [proj | diag(n_i)]
    let mut aug = IntMatrix::zero(k, n + k);
    for i in 0..k {
        for j in 0..n {
            aug.set(i, j, projection.at(i, j).clone());
        }
        aug.set(i, n + i, a.factors()[i].clone());
    }
    let full_kernel = kernel_basis(&aug);
    let mut cols = Vec::new();
    for j in 0..full_kernel.cols() {
        cols.push((0..n).map(|i| full_kernel.at(i, j).clone()).collect());
    }
    let inclusion = IntMatrix::from_columns(n, cols);
    let xt = induced_action_on_span(&p, &inclusion)?;
    Ok(QuasitrivialCover {
        p,
        projection,
        xt,
        inclusion,
    })
}

/// Action induced on a G-stable sublattice given by a basis matrix
/// (columns). Fails if the span is not stable.
pub fn induced_action_on_span(
    ambient: &GLattice,
    basis: &IntMatrix,
) -> Result<GLattice, GroupError> {
    let mut action = Vec::new();
    for gen in ambient.group().generators() {
        let images = ambient.action_of(gen.index).mul(basis);
        let coords = solve_in_basis(basis, &images).map_err(|_| GroupError::NotEquivariant {
            generator: gen.name.clone(),
        })?;
        action.push(coords);
    }
    GLattice::new(ambient.group().clone(), action, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::abelian_from_invariants(&[2]).unwrap())
    }

    fn sign_lattice(group: Arc<FiniteGroup>) -> GLattice {
        GLattice::new(group, vec![IntMatrix::from_i64(1, 1, &[-1])], None).unwrap()
    }

    #[test]
    fn abelian_groups_examples() {
        assert_eq!(
            FiniteGroup::abelian_from_invariants(&[2]).unwrap().order(),
            2
        );
        assert_eq!(
            FiniteGroup::abelian_from_invariants(&[2, 4])
                .unwrap()
                .order(),
            8
        );
        assert_eq!(
            FiniteGroup::abelian_from_invariants(&[2, 2])
                .unwrap()
                .order(),
            4
        );
        assert!(matches!(
            FiniteGroup::abelian_from_invariants(&[5, 13]),
            Err(GroupError::OrderCapExceeded { order: 65 })
        ));
    }

    #[test]
    fn bad_table_rejected() {
        let err = FiniteGroup::from_table(2, vec![1, 1, 1, 1], vec![]).unwrap_err();
        assert!(matches!(err, GroupError::NotAGroup(_)));
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(
            FiniteGroup::abelian_from_invariants(&[2])
                .unwrap()
                .subgroups()
                .len(),
            2
        );
        assert_eq!(
            FiniteGroup::abelian_from_invariants(&[2, 2])
                .unwrap()
                .subgroups()
                .len(),
            5
        );
        assert_eq!(
            FiniteGroup::abelian_from_invariants(&[2, 4])
                .unwrap()
                .subgroups()
                .len(),
            8
        );
        assert_eq!(
            FiniteGroup::abelian_from_invariants(&[2, 8])
                .unwrap()
                .subgroups()
                .len(),
            11
        );
    }

    #[test]
    fn subgroups_match_brute_force_closure_oracle() {
        // independent oracle: every subset closed under the table
        for factors in [
            vec![4],
            vec![2, 2],
            vec![6],
            vec![2, 4],
            vec![3, 3],
            vec![16],
        ] {
            let g = FiniteGroup::abelian_from_invariants(&factors).unwrap();
            let n = g.order();
            let mut oracle = Vec::new();
            for mask in 1u32..(1 << n) {
                let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                if g.is_subgroup(&set) {
                    oracle.push(set);
                }
            }
            oracle.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            assert_eq!(g.subgroups(), oracle, "factors {:?}", factors);
        }
    }

    #[test]
    fn permutation_module_examples() {
        let g = c2();
        let lat = GLattice::permutation_module(g.clone(), &vec![0, 1]).unwrap();
        assert_eq!(lat.rank(), 1);
        assert!(lat.action_of(1).is_identity());

        let lat = GLattice::permutation_module(g.clone(), &vec![0]).unwrap();
        assert_eq!(lat.rank(), 2);
        assert_eq!(lat.action_of(1), &IntMatrix::from_i64(2, 2, &[0, 1, 1, 0]));

        // Klein group, diagonal C2: elements (x,y) indexed as 2x + y
        let v4 = Arc::new(FiniteGroup::abelian_from_invariants(&[2, 2]).unwrap());
        let lat = GLattice::permutation_module(v4, &vec![0, 3]).unwrap();
        assert_eq!(lat.rank(), 2);
        assert!(lat.action_of(3).is_identity());
        assert!(!lat.action_of(1).is_identity());
        assert!(!lat.action_of(2).is_identity());
    }

    #[test]
    fn relation_verification_rejects_bad_action() {
        let g = c2();
        // order-2 generator acting by a matrix of infinite order
        let err =
            GLattice::new(g, vec![IntMatrix::from_i64(2, 2, &[1, 1, 0, 1])], None).unwrap_err();
        assert!(matches!(err, GroupError::RelationViolated { .. }));
    }

    #[test]
    fn dual_examples() {
        let g = c2();
        let perm = GLattice::permutation_module(g.clone(), &vec![0]).unwrap();
        assert_eq!(perm.dual().generator_action(), perm.generator_action());

        let sgn = sign_lattice(g.clone());
        assert_eq!(sgn.dual().generator_action(), sgn.generator_action());

        let m = IntMatrix::from_i64(2, 2, &[1, 1, 0, -1]);
        let lat = GLattice::new(g, vec![m], None).unwrap();
        assert_eq!(lat.dual().dual().generator_action(), lat.generator_action());
    }

    #[test]
    fn restrict_examples() {
        let g = Arc::new(FiniteGroup::abelian_from_invariants(&[2, 2]).unwrap());
        let lat = GLattice::permutation_module(g.clone(), &vec![0, 1]).unwrap();
        let full: Subgroup = (0..4).collect();
        let r = lat.restrict(&full).unwrap();
        assert_eq!(r.rank(), lat.rank());
        let triv = lat.restrict(&vec![0]).unwrap();
        assert_eq!(triv.group().order(), 1);
        assert!(matches!(
            lat.restrict(&vec![0, 1, 2]),
            Err(GroupError::NotASubgroup)
        ));
    }

    #[test]
    fn invariants_examples() {
        let g = c2();
        let sgn = sign_lattice(g.clone());
        assert_eq!(sgn.invariants_sublattice(&vec![0, 1]).cols(), 0);

        let reg = GLattice::permutation_module(g.clone(), &vec![0]).unwrap();
        let inv = reg.invariants_sublattice(&vec![0, 1]);
        assert_eq!(inv, IntMatrix::from_i64(2, 1, &[1, 1]));
    }

    #[test]
    fn direct_sum_and_ind_copies() {
        let g = c2();
        let triv = GLattice::trivial(g.clone(), 1);
        let sgn = sign_lattice(g.clone());
        let sum = triv.direct_sum(&sgn).unwrap();
        assert_eq!(sum.rank(), 2);

        let roles = IndRoles {
            replicated: vec![0],
            fixed: vec![],
        };
        let once = ind_copies(&sgn, &roles, 1).unwrap();
        assert_eq!(once.generator_action(), sgn.generator_action());
        let twice = ind_copies(&sgn, &roles, 2).unwrap();
        assert_eq!(twice.rank(), 2);
    }

    #[test]
    fn ind_copies_rejects_unstable_fixed_block() {
        let g = c2();
        let m = IntMatrix::from_i64(2, 2, &[0, 1, 1, 0]);
        let lat = GLattice::new(g, vec![m], None).unwrap();
        let roles = IndRoles {
            replicated: vec![1],
            fixed: vec![0],
        };
        assert!(matches!(
            ind_copies(&lat, &roles, 2),
            Err(GroupError::InvalidPartition(_))
        ));
    }

    #[test]
    fn glattice_map_equivariance() {
        let g = c2();
        let reg = GLattice::permutation_module(g.clone(), &vec![0]).unwrap();
        let triv = GLattice::trivial(g.clone(), 1);
        let aug = GLatticeMap::new(
            reg.clone(),
            triv.clone(),
            IntMatrix::from_i64(1, 2, &[1, 1]),
        );
        assert!(aug.is_ok());
        let bad = GLatticeMap::new(reg, triv, IntMatrix::from_i64(1, 2, &[1, 0]));
        assert!(matches!(bad, Err(GroupError::NotEquivariant { .. })));
    }

    #[test]
    fn quasitrivial_cover_kummer() {
        // Z/n with trivial action: P = Z, XT = nZ (the Kummer lattice)
        let trivial_group = Arc::new(FiniteGroup::abelian_from_invariants(&[1]).unwrap());
        let a = FiniteGModule::cyclic(trivial_group, 5, &[1]).unwrap();
        let cover = quasitrivial_cover(&a).unwrap();
        assert_eq!(cover.p.rank(), 1);
        assert_eq!(cover.xt.rank(), 1);
        assert_eq!(cover.inclusion, IntMatrix::from_i64(1, 1, &[5]));
    }

    #[test]
    fn quasitrivial_cover_mod2_inversion_is_trivial_action() {
        let g = c2();
        // -1 = 1 mod 2, so the action is trivial and the cover has rank 1
        let a = FiniteGModule::cyclic(g, 2, &[-1]).unwrap();
        let cover = quasitrivial_cover(&a).unwrap();
        assert_eq!(cover.p.rank(), 1);
        assert_eq!(cover.xt.rank(), 1);
    }

    #[test]
    fn quasitrivial_cover_c3_inversion() {
        let g = c2();
        let a = FiniteGModule::cyclic(g, 3, &[-1]).unwrap();
        let cover = quasitrivial_cover(&a).unwrap();
        // the generator has trivial stabilizer, so P = Z[C2]
        assert_eq!(cover.p.rank(), 2);
        // the kernel of Z[C2] -> Z/3 has full rank and index 3
        assert_eq!(cover.xt.rank(), 2);
        assert_eq!(cover.inclusion.det().abs(), BigInt::from(3));
        let comp = cover.projection.mul(&cover.inclusion);
        for j in 0..comp.cols() {
            for i in 0..comp.rows() {
                assert!((comp.at(i, j) % BigInt::from(3)).is_zero());
            }
        }
        // projection has full row rank mod the factor
        let has_unit = (0..cover.projection.cols())
            .any(|j| !(cover.projection.at(0, j) % BigInt::from(3)).is_zero());
        assert!(has_unit);
    }

    #[test]
    fn quasitrivial_cover_multifactor_index_is_module_order() {
        // A = Z/2 ⊕ Z/4 with the sign action on the second factor: the
        // kernel lattice has full rank and index |A| = 8 in P
        let g = c2();
        let a = FiniteGModule::new(
            g,
            vec![BigInt::from(2), BigInt::from(4)],
            vec![IntMatrix::from_i64(2, 2, &[1, 0, 0, -1])],
        )
        .unwrap();
        let cover = quasitrivial_cover(&a).unwrap();
        assert_eq!(cover.xt.rank(), cover.p.rank());
        assert_eq!(cover.inclusion.det().abs(), BigInt::from(8));
        // both rows of the projection carry a unit mod their factor
        for (row, factor) in [(0usize, 2i64), (1, 4)] {
            let has_unit = (0..cover.projection.cols())
                .any(|j| !(cover.projection.at(row, j) % BigInt::from(factor)).is_zero());
            assert!(has_unit, "row {} has no unit mod {}", row, factor);
        }
    }
}

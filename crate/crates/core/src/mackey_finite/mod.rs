//! Exact verification of the induced-representation machinery on finite
//! semidirect products `A x| H` with abelian `A`.
//!
//! Everything the continuum construction asserts becomes finitely checkable
//! here: characters of `A`, their `H`-orbits and stabilizers, the induced
//! block-permutation representations, the classification (irreducibility,
//! pairwise inequivalence, completeness `sum dim^2 = |G|`), and the system of
//! imprimitivity obtained by spectrally decomposing the restriction to `A`.
//!
//! Two arithmetic modes: complex floating point with 1e-12 assertions, and an
//! exact mode over roots of unity (available whenever character orders stay
//! small and stabilizers are abelian, which covers all builtin groups).

pub mod brute;
pub mod exact;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::{creal, czero, Scalar, C};
use exact::{common_order, Cyclotomic, RootPhase};
use serde::{Deserialize, Serialize};

/// A finite group given by its multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inv: Vec<usize>,
}

impl FiniteGroup {
    /// Validate a multiplication table: closure, identity, inverses, and
    /// associativity (exhaustive up to order 64, deterministically sampled
    /// above).
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        for row in table {
            if row.len() != n {
                return Err(Error::InvalidGroup("table is not square".into()));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::InvalidGroup(format!(
                        "entry {v} out of range for order {n}"
                    )));
                }
            }
        }
        let mut mul = vec![0usize; n * n];
        for (i, row) in table.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                mul[i * n + j] = v;
            }
        }
        // identity
        let mut identity = None;
        'outer: for e in 0..n {
            for g in 0..n {
                if mul[e * n + g] != g || mul[g * n + e] != g {
                    continue 'outer;
                }
            }
            identity = Some(e);
            break;
        }
        let identity = identity.ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        // inverses (rows must be permutations)
        let mut inv = vec![usize::MAX; n];
        for g in 0..n {
            let mut seen = vec![false; n];
            for h in 0..n {
                let v = mul[g * n + h];
                if seen[v] {
                    return Err(Error::InvalidGroup(format!("row {g} is not a permutation")));
                }
                seen[v] = true;
                if v == identity {
                    inv[g] = h;
                }
            }
        }
        for (g, &gi) in inv.iter().enumerate() {
            if gi == usize::MAX || mul[gi * n + g] != identity {
                return Err(Error::InvalidGroup(format!("element {g} has no two-sided inverse")));
            }
        }
        // associativity
        let check = |a: usize, b: usize, c: usize| -> bool {
            mul[mul[a * n + b] * n + c] == mul[a * n + mul[b * n + c]]
        };
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !check(a, b, c) {
                            return Err(Error::InvalidGroup(format!(
                                "associativity fails at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            // deterministic sample
            let mut state = 0x9e3779b97f4a7c15u64;
            for _ in 0..4096 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = (state >> 33) as usize % n;
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let b = (state >> 33) as usize % n;
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let c = (state >> 33) as usize % n;
                if !check(a, b, c) {
                    return Err(Error::InvalidGroup(format!(
                        "associativity fails at ({a}, {b}, {c})"
                    )));
                }
            }
        }
        Ok(FiniteGroup {
            order: n,
            mul,
            identity,
            inv,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let table: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::from_table(&table).expect("cyclic table is a group")
    }

    /// Direct product; element `(i, j)` is encoded as `i * other.order + j`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Self {
        let n = self.order * other.order;
        let mut table = vec![vec![0usize; n]; n];
        for i1 in 0..self.order {
            for j1 in 0..other.order {
                for i2 in 0..self.order {
                    for j2 in 0..other.order {
                        let a = i1 * other.order + j1;
                        let b = i2 * other.order + j2;
                        table[a][b] = self.mul(i1, i2) * other.order + other.mul(j1, j2);
                    }
                }
            }
        }
        Self::from_table(&table).expect("product table is a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn is_abelian(&self) -> bool {
        for a in 0..self.order {
            for b in 0..a {
                if self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
            }
        }
        true
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut k = 1;
        let mut acc = g;
        while acc != self.identity {
            acc = self.mul(acc, g);
            k += 1;
        }
        k
    }

    pub fn pow(&self, g: usize, k: usize) -> usize {
        let mut acc = self.identity;
        for _ in 0..k {
            acc = self.mul(acc, g);
        }
        acc
    }

    /// The subgroup on the given element indices, with its index maps.
    pub fn subgroup(&self, elements: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        let pos = |g: usize| elements.iter().position(|&e| e == g);
        let mut table = vec![vec![0usize; elements.len()]; elements.len()];
        for (i, &a) in elements.iter().enumerate() {
            for (j, &b) in elements.iter().enumerate() {
                let p = pos(self.mul(a, b)).ok_or_else(|| {
                    Error::InvalidGroup("subset is not closed under multiplication".into())
                })?;
                table[i][j] = p;
            }
        }
        Ok((FiniteGroup::from_table(&table)?, elements.to_vec()))
    }
}

/// A finite semidirect product `A x| H`, `A` abelian, acting through the
/// automorphism table `action[h][a]`.
#[derive(Clone, Debug)]
pub struct SemidirectProduct {
    pub a: FiniteGroup,
    pub h: FiniteGroup,
    action: Vec<Vec<usize>>,
    pub name: String,
}

impl SemidirectProduct {
    pub fn new(a: FiniteGroup, h: FiniteGroup, action: Vec<Vec<usize>>, name: &str) -> Result<Self> {
        if !a.is_abelian() {
            return Err(Error::NotAbelian);
        }
        if action.len() != h.order() {
            return Err(Error::InvalidGroup("action table has wrong height".into()));
        }
        for (hi, row) in action.iter().enumerate() {
            if row.len() != a.order() {
                return Err(Error::InvalidGroup("action table has wrong width".into()));
            }
            // bijection
            let mut seen = vec![false; a.order()];
            for &v in row {
                if v >= a.order() || seen[v] {
                    return Err(Error::InvalidGroup(format!("action of h={hi} is not a bijection")));
                }
                seen[v] = true;
            }
            // automorphism
            for x in 0..a.order() {
                for y in 0..a.order() {
                    if row[a.mul(x, y)] != a.mul(row[x], row[y]) {
                        return Err(Error::InvalidGroup(format!(
                            "action of h={hi} is not an automorphism"
                        )));
                    }
                }
            }
        }
        // homomorphism H -> Aut(A), identity acts trivially
        for x in 0..a.order() {
            if action[h.identity()][x] != x {
                return Err(Error::InvalidGroup("identity of H must act trivially".into()));
            }
        }
        for h1 in 0..h.order() {
            for h2 in 0..h.order() {
                for x in 0..a.order() {
                    if action[h.mul(h1, h2)][x] != action[h1][action[h2][x]] {
                        return Err(Error::InvalidGroup("action is not a homomorphism".into()));
                    }
                }
            }
        }
        Ok(SemidirectProduct {
            a,
            h,
            action,
            name: name.to_string(),
        })
    }

    pub fn order(&self) -> usize {
        self.a.order() * self.h.order()
    }

    pub fn act(&self, h: usize, a: usize) -> usize {
        self.action[h][a]
    }

    /// Flat element index of `(a, h)`.
    pub fn encode(&self, a: usize, h: usize) -> usize {
        h * self.a.order() + a
    }

    pub fn decode(&self, g: usize) -> (usize, usize) {
        (g % self.a.order(), g / self.a.order())
    }

    /// `(a1, h1)(a2, h2) = (a1 + h1.a2, h1 h2)`.
    pub fn mul(&self, g1: usize, g2: usize) -> usize {
        let (a1, h1) = self.decode(g1);
        let (a2, h2) = self.decode(g2);
        self.encode(self.a.mul(a1, self.act(h1, a2)), self.h.mul(h1, h2))
    }

    /// The flat multiplication table as a plain finite group.
    pub fn as_finite_group(&self) -> FiniteGroup {
        let n = self.order();
        let table: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).map(|j| self.mul(i, j)).collect())
            .collect();
        FiniteGroup::from_table(&table).expect("semidirect product is a group")
    }

    /// `S3 = Z3 x| Z2` with the inversion action.
    pub fn s3() -> Self {
        Self::cyclic_inversion(3, "S3")
    }

    /// `D4 = Z4 x| Z2` with the inversion action.
    pub fn d4() -> Self {
        Self::cyclic_inversion(4, "D4")
    }

    fn cyclic_inversion(n: usize, name: &str) -> Self {
        let a = FiniteGroup::cyclic(n);
        let h = FiniteGroup::cyclic(2);
        let action = vec![
            (0..n).collect::<Vec<_>>(),
            (0..n).map(|x| (n - x) % n).collect(),
        ];
        Self::new(a, h, action, name).expect("inversion semidirect product")
    }

    /// `A4 = (Z2 x Z2) x| Z3`, the 3-cycle permuting the involutions.
    pub fn a4() -> Self {
        let z2 = FiniteGroup::cyclic(2);
        let a = z2.direct_product(&z2);
        let h = FiniteGroup::cyclic(3);
        // elements of A: 0=(0,0), 1=(0,1), 2=(1,0), 3=(1,1); cycle 2 -> 1 -> 3 -> 2
        let phi = vec![0usize, 3, 1, 2];
        let phi2: Vec<usize> = (0..4).map(|x| phi[phi[x]]).collect();
        let action = vec![(0..4).collect::<Vec<_>>(), phi, phi2];
        Self::new(a, h, action, "A4").expect("A4")
    }

    /// `Z5 x| Z4` with `h . a = 2^h a`.
    pub fn z5_rtimes_z4() -> Self {
        let a = FiniteGroup::cyclic(5);
        let h = FiniteGroup::cyclic(4);
        let mut action = Vec::new();
        let mut mult = 1usize;
        for _ in 0..4 {
            action.push((0..5).map(|x| (x * mult) % 5).collect());
            mult = (mult * 2) % 5;
        }
        Self::new(a, h, action, "Z5:Z4").expect("Z5:Z4")
    }

    /// The Heisenberg group over `Z3`, presented as `(Z3 x Z3) x| Z3` with
    /// `x . (y, z) = (y, z + x y)`.
    pub fn heisenberg_z3() -> Self {
        let z3 = FiniteGroup::cyclic(3);
        let a = z3.direct_product(&z3);
        let h = FiniteGroup::cyclic(3);
        let mut action = Vec::new();
        for x in 0..3usize {
            action.push(
                (0..9)
                    .map(|idx: usize| {
                        let (y, z) = (idx / 3, idx % 3);
                        y * 3 + (z + x * y) % 3
                    })
                    .collect(),
            );
        }
        Self::new(a, h, action, "Heis3").expect("Heisenberg Z3")
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "S3" | "s3" => Ok(Self::s3()),
            "D4" | "d4" => Ok(Self::d4()),
            "A4" | "a4" => Ok(Self::a4()),
            "Z5:Z4" | "z5:z4" | "Z5xZ4" | "z5xz4" => Ok(Self::z5_rtimes_z4()),
            "Heis3" | "heis3" | "heisenberg3" => Ok(Self::heisenberg_z3()),
            other => Err(Error::InvalidGroup(format!("unknown builtin group '{other}'"))),
        }
    }
}

/// An exact character of the abelian normal factor: one root of unity per
/// element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub values: Vec<RootPhase>,
}

impl Character {
    pub fn value<T: Scalar>(&self, a: usize) -> C<T> {
        self.values[a].value()
    }

    pub fn phase(&self, a: usize) -> RootPhase {
        self.values[a]
    }

    pub fn mul(&self, other: &Character) -> Character {
        Character {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(p, q)| p.mul(q))
                .collect(),
        }
    }

    /// Largest order of any value; the character group has exponent equal to
    /// the exponent of `A`.
    pub fn order(&self) -> u64 {
        common_order(self.values.iter())
    }
}

/// All `|A|` characters of a finite abelian group, built by extending along a
/// generating chain; values are exact roots of unity.
pub fn character_group(a: &FiniteGroup) -> Result<Vec<Character>> {
    if !a.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let n = a.order();
    // positions[g] = index of g in the current subgroup enumeration
    let mut elements = vec![a.identity()];
    let mut pos = vec![usize::MAX; n];
    pos[a.identity()] = 0;
    let mut chars: Vec<Vec<RootPhase>> = vec![vec![RootPhase::one()]];

    for g in 0..n {
        if pos[g] != usize::MAX {
            continue;
        }
        // smallest k >= 1 with g^k in the current subgroup
        let mut k = 1usize;
        let mut acc = g;
        while pos[acc] == usize::MAX {
            acc = a.mul(acc, g);
            k += 1;
        }
        let idx_gk = pos[acc];
        // new element enumeration: g^m * s
        let old_elements = elements.clone();
        let mut new_elements = Vec::with_capacity(old_elements.len() * k);
        for m in 0..k {
            let gm = a.pow(g, m);
            for &s in &old_elements {
                new_elements.push(a.mul(gm, s));
            }
        }
        for (i, &e) in new_elements.iter().enumerate() {
            pos[e] = i;
        }
        // extend every character in k ways
        let mut new_chars = Vec::with_capacity(chars.len() * k);
        for chi in &chars {
            let target = chi[idx_gk];
            for j in 0..k as u64 {
                // zeta^k = target
                let zeta = RootPhase::new(
                    (target.num() + j * target.order()) as i64,
                    k as u64 * target.order(),
                );
                let mut vals = Vec::with_capacity(new_elements.len());
                for m in 0..k {
                    let zm = zeta.pow(m as u64);
                    for s_idx in 0..old_elements.len() {
                        vals.push(zm.mul(&chi[s_idx]));
                    }
                }
                new_chars.push(vals);
            }
        }
        elements = new_elements;
        chars = new_chars;
        if elements.len() == n {
            break;
        }
    }

    // reindex values by element id
    let mut out = Vec::with_capacity(chars.len());
    for chi in chars {
        let mut values = vec![RootPhase::one(); n];
        for (i, &e) in elements.iter().enumerate() {
            values[e] = chi[i];
        }
        out.push(Character { values });
    }
    // put the trivial character first for deterministic reports
    out.sort_by_key(|c| c.values.iter().any(|p| !p.is_one()));
    Ok(out)
}

/// `(h . x)(a) = x(h^{-1} . a)`; returns the index of the transported
/// character within `chars`.
pub fn act_on_character(
    g: &SemidirectProduct,
    chars: &[Character],
    h: usize,
    chi: usize,
) -> usize {
    let hinv = g.h.inverse(h);
    let moved = Character {
        values: (0..g.a.order()).map(|a| chars[chi].values[g.act(hinv, a)]).collect(),
    };
    chars
        .iter()
        .position(|c| *c == moved)
        .expect("character group is closed under the H-action")
}

/// One H-orbit in the character group: base point, members, stabilizer, and
/// the deterministic section `c(x)` (first table-order element of `H`
/// carrying the base point to `x`).
#[derive(Clone, Debug)]
pub struct OrbitData {
    pub base: usize,
    pub members: Vec<usize>,
    pub stabilizer_elements: Vec<usize>,
    pub section: Vec<usize>,
}

pub fn orbits_and_stabilizers(g: &SemidirectProduct, chars: &[Character]) -> Vec<OrbitData> {
    let mut seen = vec![false; chars.len()];
    let mut out = Vec::new();
    for x0 in 0..chars.len() {
        if seen[x0] {
            continue;
        }
        let mut members = Vec::new();
        let mut section = Vec::new();
        for h in 0..g.h.order() {
            let x = act_on_character(g, chars, h, x0);
            if !members.contains(&x) {
                members.push(x);
                section.push(h);
            }
        }
        let stabilizer_elements: Vec<usize> = (0..g.h.order())
            .filter(|&h| act_on_character(g, chars, h, x0) == x0)
            .collect();
        for &x in &members {
            seen[x] = true;
        }
        out.push(OrbitData {
            base: x0,
            members,
            stabilizer_elements,
            section,
        });
    }
    out
}

/// A unitary representation as explicit matrices over flat element indices.
#[derive(Clone, Debug)]
pub struct UnitaryRep<T> {
    pub dim: usize,
    pub mats: Vec<CMat<T>>,
}

impl<T: Scalar> UnitaryRep<T> {
    pub fn character(&self) -> Vec<C<T>> {
        self.mats.iter().map(|m| m.trace()).collect()
    }

    pub fn unitarity_residual(&self) -> T {
        self.mats
            .iter()
            .map(|m| m.unitarity_residual())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Multiplicativity over the given flat multiplication rule.
    pub fn multiplicativity_residual(&self, mul: impl Fn(usize, usize) -> usize) -> T {
        let n = self.mats.len();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let prod = &self.mats[i] * &self.mats[j];
                worst = worst.max(prod.max_abs_diff(&self.mats[mul(i, j)]));
            }
        }
        worst
    }

    /// `(1/n) sum_g chi_1(g) conj(chi_2(g))`.
    pub fn character_inner(&self, other: &UnitaryRep<T>) -> C<T> {
        let n = self.mats.len();
        let mut acc: C<T> = czero();
        for (m1, m2) in self.mats.iter().zip(&other.mats) {
            acc += m1.trace() * m2.trace().conj();
        }
        acc * creal(T::one() / T::real(n as f64))
    }
}

/// The induced representation `V^{D, Omega}` of `G = A x| H` from a unitary
/// representation `D` of the stabilizer of the orbit's base character:
/// `(V_{ah} psi)(x) = <x, a> D(c(x)^{-1} h c(h^{-1} x)) psi(h^{-1} x)`,
/// realized as block-permutation matrices of dimension `|orbit| * dim D`.
pub fn induce<T: Scalar>(
    g: &SemidirectProduct,
    chars: &[Character],
    orbit: &OrbitData,
    d: &UnitaryRep<T>,
) -> Result<UnitaryRep<T>> {
    let stab = &orbit.stabilizer_elements;
    if d.mats.len() != stab.len() {
        return Err(Error::InvalidGroup(
            "stabilizer representation has the wrong number of matrices".into(),
        ));
    }
    let stab_pos = |h: usize| -> Result<usize> {
        stab.iter()
            .position(|&s| s == h)
            .ok_or_else(|| Error::InvalidGroup("element not in stabilizer".into()))
    };
    let dim_block = d.dim;
    let dim = orbit.members.len() * dim_block;
    let orbit_pos = |x: usize| orbit.members.iter().position(|&m| m == x).expect("orbit member");

    let mut mats = Vec::with_capacity(g.order());
    for gi in 0..g.order() {
        let (a, h) = g.decode(gi);
        let mut mat = CMat::zeros(dim, dim);
        for (xi, &x) in orbit.members.iter().enumerate() {
            // source block: h^{-1} . x
            let hinv = g.h.inverse(h);
            let xs = act_on_character(g, chars, hinv, x);
            let si = orbit_pos(xs);
            // little-group element c(x)^{-1} h c(h^{-1} x)
            let cx = orbit.section[xi];
            let cxs = orbit.section[si];
            let w = g.h.mul(g.h.mul(g.h.inverse(cx), h), cxs);
            let block = &d.mats[stab_pos(w)?];
            let phase: C<T> = chars[x].value(a);
            for r in 0..dim_block {
                for c in 0..dim_block {
                    mat[(xi * dim_block + r, si * dim_block + c)] = phase * block[(r, c)];
                }
            }
        }
        mats.push(mat);
    }
    Ok(UnitaryRep { dim, mats })
}

/// Exact monomial form of an induced representation from a 1-dimensional
/// stabilizer character: each group element acts as a permutation of the
/// orbit with root-of-unity phases.
#[derive(Clone, Debug)]
pub struct ExactInducedRep {
    pub dim: usize,
    /// per group element: `target[col] = row` and the phase on that entry
    pub target: Vec<Vec<usize>>,
    pub phase: Vec<Vec<RootPhase>>,
}

/// Induce from an exact character `d_char` of the stabilizer (values indexed
/// by stabilizer position).
pub fn induce_exact(
    g: &SemidirectProduct,
    chars: &[Character],
    orbit: &OrbitData,
    d_char: &[RootPhase],
) -> ExactInducedRep {
    let stab = &orbit.stabilizer_elements;
    let dim = orbit.members.len();
    let orbit_pos = |x: usize| orbit.members.iter().position(|&m| m == x).expect("orbit member");
    let mut target = Vec::with_capacity(g.order());
    let mut phase = Vec::with_capacity(g.order());
    for gi in 0..g.order() {
        let (a, h) = g.decode(gi);
        let mut tg = vec![0usize; dim];
        let mut ph = vec![RootPhase::one(); dim];
        for (xi, &x) in orbit.members.iter().enumerate() {
            let hinv = g.h.inverse(h);
            let xs = act_on_character(g, chars, hinv, x);
            let si = orbit_pos(xs);
            let cx = orbit.section[xi];
            let cxs = orbit.section[si];
            let w = g.h.mul(g.h.mul(g.h.inverse(cx), h), cxs);
            let wp = stab.iter().position(|&s| s == w).expect("stabilizer element");
            tg[si] = xi;
            ph[si] = chars[x].phase(a).mul(&d_char[wp]);
        }
        target.push(tg);
        phase.push(ph);
    }
    ExactInducedRep { dim, target, phase }
}

impl ExactInducedRep {
    /// Exact character: sum of phases on fixed points.
    pub fn character_cyclotomic(&self, g_index: usize, order: u64) -> Cyclotomic {
        let mut acc = Cyclotomic::zero(order);
        for (col, &row) in self.target[g_index].iter().enumerate() {
            if row == col {
                acc.add_assign(&Cyclotomic::from_phase(&self.phase[g_index][col], order));
            }
        }
        acc
    }

    pub fn to_float<T: Scalar>(&self) -> UnitaryRep<T> {
        let mats = (0..self.target.len())
            .map(|gi| {
                let mut m = CMat::zeros(self.dim, self.dim);
                for (col, &row) in self.target[gi].iter().enumerate() {
                    m[(row, col)] = self.phase[gi][col].value();
                }
                m
            })
            .collect();
        UnitaryRep {
            dim: self.dim,
            mats,
        }
    }

    /// Largest phase order appearing anywhere in the representation.
    pub fn max_order(&self) -> u64 {
        self.phase
            .iter()
            .flat_map(|v| v.iter())
            .fold(1u64, |acc, p| {
                let o = p.order();
                acc / gcd_u64(acc, o) * o
            })
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Exact character inner product `sum_g chi_1(g) conj(chi_2(g))` as a
/// cyclotomic integer (not divided by `|G|`).
pub fn exact_character_inner(
    g: &SemidirectProduct,
    r1: &ExactInducedRep,
    r2: &ExactInducedRep,
    order: u64,
) -> Cyclotomic {
    let mut acc = Cyclotomic::zero(order);
    for gi in 0..g.order() {
        let c1 = r1.character_cyclotomic(gi, order);
        let c2 = r2.character_cyclotomic(gi, order);
        acc.add_assign(&c1.mul(&c2.conj()));
    }
    acc
}

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub detail: String,
}

/// Per-orbit data in the verification report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitReport {
    pub orbit_size: usize,
    pub stabilizer_order: usize,
    pub induced_dims: Vec<usize>,
}

/// Full verification report for one semidirect product.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MackeyReport {
    pub schema: u32,
    pub group: String,
    pub order: usize,
    pub exact_mode: bool,
    pub orbits: Vec<OrbitReport>,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

/// Residues of the finite system-of-imprimitivity conditions for a unitary
/// representation `W` of `G`: spectral projections of `W|A` by character
/// averaging, completeness, orthogonality, and the covariance
/// `V_h P(x) V_h^{-1} = P(h . x)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImprimitivityReport {
    pub resolution_residual: f64,
    pub orthogonality_residual: f64,
    pub covariance_residual: f64,
    pub projection_ranks: Vec<usize>,
    pub failures: Vec<String>,
    pub pass: bool,
}

pub fn imprimitivity_check<T: Scalar>(
    g: &SemidirectProduct,
    chars: &[Character],
    w: &UnitaryRep<T>,
    tol: T,
) -> ImprimitivityReport {
    let na = g.a.order();
    let dim = w.dim;
    let scale = creal(T::one() / T::real(na as f64));
    // P(x) = (1/|A|) sum_a conj(<x, a>) W(a)
    let projections: Vec<CMat<T>> = chars
        .iter()
        .map(|chi| {
            let mut acc = CMat::zeros(dim, dim);
            for a in 0..na {
                let phase: C<T> = chi.value::<T>(a).conj();
                let idx = g.encode(a, g.h.identity());
                acc = &acc + &w.mats[idx].scale(phase);
            }
            acc.scale(scale)
        })
        .collect();

    let mut failures = Vec::new();
    let mut sum = CMat::zeros(dim, dim);
    for p in &projections {
        sum = &sum + p;
    }
    let resolution = sum.max_abs_diff(&CMat::identity(dim));

    let mut ortho = T::zero();
    for (i, p) in projections.iter().enumerate() {
        for (j, q) in projections.iter().enumerate() {
            let prod = p * q;
            let expect = if i == j { p.clone() } else { CMat::zeros(dim, dim) };
            let r = prod.max_abs_diff(&expect);
            if r > tol {
                failures.push(format!("orthogonality fails for characters ({i}, {j})"));
            }
            ortho = ortho.max(r);
        }
    }

    let mut cov = T::zero();
    for h in 0..g.h.order() {
        let vh = &w.mats[g.encode(g.a.identity(), h)];
        let vh_inv = &w.mats[g.encode(g.a.identity(), g.h.inverse(h))];
        for (xi, p) in projections.iter().enumerate() {
            let moved = &(vh * p) * vh_inv;
            let target = act_on_character(g, chars, h, xi);
            let r = moved.max_abs_diff(&projections[target]);
            if r > tol {
                failures.push(format!("covariance fails at (h = {h}, x = {xi})"));
            }
            cov = cov.max(r);
        }
    }

    let ranks: Vec<usize> = projections
        .iter()
        .map(|p| {
            let t = p.trace().re;
            t.round().to_f64().unwrap_or(0.0) as usize
        })
        .collect();
    let tolf = tol.to_f64().unwrap_or(1e-12);
    let pass = resolution.to_f64().unwrap_or(f64::MAX) < tolf
        && ortho.to_f64().unwrap_or(f64::MAX) < tolf
        && cov.to_f64().unwrap_or(f64::MAX) < tolf;
    ImprimitivityReport {
        resolution_residual: resolution.to_f64().unwrap_or(f64::NAN),
        orthogonality_residual: ortho.to_f64().unwrap_or(f64::NAN),
        covariance_residual: cov.to_f64().unwrap_or(f64::NAN),
        projection_ranks: ranks,
        failures,
        pass,
    }
}

/// Build every induced representation of `G` (one per orbit and stabilizer
/// irrep), check irreducibility, pairwise inequivalence, completeness, the
/// restriction-to-A multiplicities, and the imprimitivity conditions.
///
/// In exact mode (abelian stabilizers, character orders at most 24) the
/// irreducibility and orthogonality assertions are performed in cyclotomic
/// integer arithmetic; otherwise in floating point at 1e-12.
pub fn verify_mackey(g: &SemidirectProduct, exact: bool, seed: u64) -> Result<MackeyReport> {
    let tol = 1e-12;
    let chars = character_group(&g.a)?;
    let orbits = orbits_and_stabilizers(g, &chars);
    let mut checks: Vec<CheckResult> = Vec::new();
    let mut orbit_reports = Vec::new();

    let push = |checks: &mut Vec<CheckResult>, name: String, pass: bool, residual: f64, detail: String| {
        checks.push(CheckResult {
            name,
            pass,
            residual,
            detail,
        });
    };

    // |A^| = |A|
    push(
        &mut checks,
        "character_count".into(),
        chars.len() == g.a.order(),
        0.0,
        format!("{} characters for |A| = {}", chars.len(), g.a.order()),
    );

    // orbit-stabilizer counting
    for (oi, orbit) in orbits.iter().enumerate() {
        let ok = orbit.members.len() * orbit.stabilizer_elements.len() == g.h.order();
        push(
            &mut checks,
            format!("orbit_{oi}_counting"),
            ok,
            0.0,
            format!(
                "|orbit| {} x |stabilizer| {} vs |H| {}",
                orbit.members.len(),
                orbit.stabilizer_elements.len(),
                g.h.order()
            ),
        );
    }

    // stabilizer irreps and induced representations
    struct Class<T> {
        orbit_index: usize,
        rep: UnitaryRep<T>,
        exact: Option<ExactInducedRep>,
    }
    let mut classes: Vec<Class<f64>> = Vec::new();
    let mut exact_available = exact;
    for (oi, orbit) in orbits.iter().enumerate() {
        let (stab_group, _els) = g.h.subgroup(&orbit.stabilizer_elements)?;
        // brute-force irreps of the stabilizer: the independent oracle
        let brute = brute::brute_force_irreps::<f64>(&stab_group, seed ^ (oi as u64))?;
        let mut dims = Vec::new();
        if stab_group.is_abelian() {
            // exact characters, ordered to match the brute-force irreps
            let stab_chars = character_group(&stab_group)?;
            // pair each brute irrep (dim 1) with the matching exact character
            for rep in &brute {
                if rep.dim != 1 {
                    return Err(Error::InvalidGroup(
                        "abelian stabilizer produced a higher-dimensional irrep".into(),
                    ));
                }
            }
            for chi in &stab_chars {
                let d_char: Vec<RootPhase> =
                    (0..stab_group.order()).map(|i| chi.phase(i)).collect();
                let ex = induce_exact(g, &chars, orbit, &d_char);
                dims.push(ex.dim);
                let rep = ex.to_float::<f64>();
                classes.push(Class {
                    orbit_index: oi,
                    rep,
                    exact: Some(ex),
                });
            }
        } else {
            exact_available = false;
            for d in brute {
                let rep = induce(g, &chars, orbit, &d)?;
                dims.push(rep.dim);
                classes.push(Class {
                    orbit_index: oi,
                    rep,
                    exact: None,
                });
            }
        }
        orbit_reports.push(OrbitReport {
            orbit_size: orbit.members.len(),
            stabilizer_order: orbit.stabilizer_elements.len(),
            induced_dims: dims,
        });
    }

    // choose the cyclotomic order
    let cyc_order = classes
        .iter()
        .filter_map(|c| c.exact.as_ref())
        .fold(1u64, |acc, e| {
            let o = e.max_order();
            acc / gcd_u64(acc, o) * o
        });
    let exact_mode = exact_available && cyc_order <= 24;

    // representation property and unitarity
    let mut rep_residual = 0.0f64;
    let mut unit_residual = 0.0f64;
    for class in &classes {
        rep_residual = rep_residual.max(class.rep.multiplicativity_residual(|i, j| g.mul(i, j)));
        unit_residual = unit_residual.max(class.rep.unitarity_residual());
    }
    push(
        &mut checks,
        "induced_is_representation".into(),
        rep_residual < tol,
        rep_residual,
        "max multiplicativity residual over all classes".into(),
    );
    push(
        &mut checks,
        "induced_is_unitary".into(),
        unit_residual < tol,
        unit_residual,
        "max unitarity residual over all classes".into(),
    );

    // irreducibility
    for (ci, class) in classes.iter().enumerate() {
        let name = format!("class_{ci}_irreducible");
        if exact_mode {
            let ex = class.exact.as_ref().expect("exact mode has exact reps");
            let norm = exact_character_inner(g, ex, ex, cyc_order);
            let ok = norm.equals_integer(g.order() as i64);
            push(
                &mut checks,
                name,
                ok,
                0.0,
                format!("exact character norm = |G| in Z[zeta_{cyc_order}]"),
            );
        } else {
            let inner = class.rep.character_inner(&class.rep);
            let res = (inner - creal(1.0)).norm();
            push(&mut checks, name, res < tol, res, "character norm 1".into());
        }
    }

    // pairwise inequivalence
    let mut worst_pair = 0.0f64;
    let mut pair_pass = true;
    for i in 0..classes.len() {
        for j in 0..i {
            if exact_mode {
                let inner = exact_character_inner(
                    g,
                    classes[i].exact.as_ref().unwrap(),
                    classes[j].exact.as_ref().unwrap(),
                    cyc_order,
                );
                if !inner.equals_integer(0) {
                    pair_pass = false;
                }
            } else {
                let res = classes[i].rep.character_inner(&classes[j].rep).norm();
                worst_pair = worst_pair.max(res);
                if res >= tol {
                    pair_pass = false;
                }
            }
        }
    }
    push(
        &mut checks,
        "classes_pairwise_inequivalent".into(),
        pair_pass,
        worst_pair,
        format!("{} classes", classes.len()),
    );

    // completeness
    let sum_sq: usize = classes.iter().map(|c| c.rep.dim * c.rep.dim).sum();
    push(
        &mut checks,
        "completeness_sum_of_squares".into(),
        sum_sq == g.order(),
        0.0,
        format!("sum dim^2 = {} vs |G| = {}", sum_sq, g.order()),
    );

    // restriction to A decomposes into the orbit characters with
    // multiplicity dim D
    let mut restrict_pass = true;
    let mut restrict_res = 0.0f64;
    for class in &classes {
        let orbit = &orbits[class.orbit_index];
        let dim_d = class.rep.dim / orbit.members.len();
        for (yi, _chi) in chars.iter().enumerate() {
            let mut acc = num_complex::Complex::new(0.0f64, 0.0);
            for a in 0..g.a.order() {
                let tr = class.rep.mats[g.encode(a, g.h.identity())].trace();
                acc += chars[yi].value::<f64>(a).conj() * tr;
            }
            acc /= g.a.order() as f64;
            let expect = if orbit.members.contains(&yi) { dim_d as f64 } else { 0.0 };
            let res = (acc - num_complex::Complex::new(expect, 0.0)).norm();
            restrict_res = restrict_res.max(res);
            if res >= 1e-10 {
                restrict_pass = false;
            }
        }
    }
    push(
        &mut checks,
        "restriction_to_a_multiplicities".into(),
        restrict_pass,
        restrict_res,
        "V|A decomposes into the orbit characters with multiplicity dim D".into(),
    );

    // imprimitivity system for every induced representation
    let mut imprim_pass = true;
    let mut imprim_res = 0.0f64;
    for class in &classes {
        let rep = imprimitivity_check(g, &chars, &class.rep, 1e-12);
        imprim_res = imprim_res
            .max(rep.resolution_residual)
            .max(rep.orthogonality_residual)
            .max(rep.covariance_residual);
        if !rep.pass {
            imprim_pass = false;
        }
    }
    push(
        &mut checks,
        "imprimitivity_system".into(),
        imprim_pass,
        imprim_res,
        "spectral projections of W|A: completeness, orthogonality, covariance".into(),
    );

    let pass = checks.iter().all(|c| c.pass);
    Ok(MackeyReport {
        schema: 1,
        group: g.name.clone(),
        order: g.order(),
        exact_mode,
        orbits: orbit_reports,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_characters() {
        let z4 = FiniteGroup::cyclic(4);
        let chars = character_group(&z4).unwrap();
        assert_eq!(chars.len(), 4);
        // characters are a |-> i^{k a}
        for chi in &chars {
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(
                        chi.values[(a + b) % 4],
                        chi.values[a].mul(&chi.values[b])
                    );
                }
            }
        }
        // pairwise distinct
        for i in 0..4 {
            for j in 0..i {
                assert_ne!(chars[i], chars[j]);
            }
        }
        // trivial group
        let z1 = FiniteGroup::cyclic(1);
        assert_eq!(character_group(&z1).unwrap().len(), 1);
        // Z2 x Z2
        let z2 = FiniteGroup::cyclic(2);
        let v4 = z2.direct_product(&z2);
        assert_eq!(character_group(&v4).unwrap().len(), 4);
    }

    #[test]
    fn character_group_rejects_nonabelian() {
        let s3 = SemidirectProduct::s3().as_finite_group();
        assert!(character_group(&s3).is_err());
    }

    #[test]
    fn d4_orbit_structure() {
        let d4 = SemidirectProduct::d4();
        let chars = character_group(&d4.a).unwrap();
        let orbits = orbits_and_stabilizers(&d4, &chars);
        let mut sizes: Vec<(usize, usize)> = orbits
            .iter()
            .map(|o| (o.members.len(), o.stabilizer_elements.len()))
            .collect();
        sizes.sort();
        assert_eq!(sizes, vec![(1, 2), (1, 2), (2, 1)]);
        for o in &orbits {
            for (mi, &x) in o.members.iter().enumerate() {
                assert_eq!(act_on_character(&d4, &chars, o.section[mi], o.base), x);
            }
        }
    }

    #[test]
    fn trivial_action_gives_singletons() {
        let a = FiniteGroup::cyclic(3);
        let h = FiniteGroup::cyclic(2);
        let action = vec![(0..3).collect::<Vec<_>>(), (0..3).collect::<Vec<_>>()];
        let g = SemidirectProduct::new(a, h, action, "Z3xZ2").unwrap();
        let chars = character_group(&g.a).unwrap();
        let orbits = orbits_and_stabilizers(&g, &chars);
        assert_eq!(orbits.len(), 3);
        for o in &orbits {
            assert_eq!(o.members.len(), 1);
            assert_eq!(o.stabilizer_elements.len(), 2);
        }
    }

    #[test]
    fn induced_dimension_and_triviality() {
        let d4 = SemidirectProduct::d4();
        let chars = character_group(&d4.a).unwrap();
        let orbits = orbits_and_stabilizers(&d4, &chars);
        for orbit in &orbits {
            let (stab, _) = d4.h.subgroup(&orbit.stabilizer_elements).unwrap();
            let stab_chars = character_group(&stab).unwrap();
            for chi in &stab_chars {
                let d_char: Vec<RootPhase> = (0..stab.order()).map(|i| chi.phase(i)).collect();
                let ex = induce_exact(&d4, &chars, orbit, &d_char);
                assert_eq!(ex.dim, orbit.members.len());
                let rep = ex.to_float::<f64>();
                assert!(rep.multiplicativity_residual(|i, j| d4.mul(i, j)) < 1e-12);
                assert!(rep.unitarity_residual() < 1e-12);
            }
        }
        // the trivial orbit with the trivial character gives the trivial rep
        let trivial_orbit = orbits
            .iter()
            .find(|o| o.members.len() == 1 && chars[o.base].values.iter().all(|p| p.is_one()))
            .unwrap();
        let (stab, _) = d4.h.subgroup(&trivial_orbit.stabilizer_elements).unwrap();
        let stab_chars = character_group(&stab).unwrap();
        let trivial_char: Vec<RootPhase> = (0..stab.order()).map(|_| RootPhase::one()).collect();
        assert!(stab_chars.iter().any(|c| (0..stab.order()).all(|i| c.phase(i).is_one())));
        let ex = induce_exact(&d4, &chars, trivial_orbit, &trivial_char);
        let rep = ex.to_float::<f64>();
        for m in &rep.mats {
            assert!(m.max_abs_diff(&CMat::identity(1)) < 1e-15);
        }
    }

    #[test]
    fn d4_two_dimensional_irrep_matches_character_oracle() {
        // induce the full orbit with the trivial stabilizer rep and compare
        // characters against the brute-force table of D4 itself
        let d4 = SemidirectProduct::d4();
        let chars = character_group(&d4.a).unwrap();
        let orbits = orbits_and_stabilizers(&d4, &chars);
        let orbit = orbits.iter().find(|o| o.members.len() == 2).unwrap();
        let ex = induce_exact(&d4, &chars, orbit, &[RootPhase::one()]);
        let rep = ex.to_float::<f64>();
        assert_eq!(rep.dim, 2);
        let flat = d4.as_finite_group();
        let oracle = brute::brute_force_irreps::<f64>(&flat, 7).unwrap();
        let two_dim = oracle.iter().find(|r| r.dim == 2).expect("D4 has a 2-dim irrep");
        // characters agree up to ordering of group elements (same flat index)
        let c1 = rep.character();
        let c2 = two_dim.character();
        for (a, b) in c1.iter().zip(&c2) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn verify_mackey_on_builtin_groups() {
        for (name, expected_dims) in [
            ("S3", vec![1usize, 1, 2]),
            ("D4", vec![1, 1, 1, 1, 2]),
            ("A4", vec![1, 1, 1, 3]),
            ("Z5:Z4", vec![1, 1, 1, 1, 4]),
            ("Heis3", vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 3, 3]),
        ] {
            let g = SemidirectProduct::builtin(name).unwrap();
            let report = verify_mackey(&g, true, 11).unwrap();
            assert!(report.pass, "{name}: {:#?}", report.checks);
            assert!(report.exact_mode, "{name} should run exactly");
            let mut dims: Vec<usize> = report
                .orbits
                .iter()
                .flat_map(|o| o.induced_dims.iter().copied())
                .collect();
            dims.sort();
            assert_eq!(dims, expected_dims, "{name}");
        }
    }

    #[test]
    fn imprimitivity_on_d4_swaps_rank_one_projections() {
        let d4 = SemidirectProduct::d4();
        let chars = character_group(&d4.a).unwrap();
        let orbits = orbits_and_stabilizers(&d4, &chars);
        let orbit = orbits.iter().find(|o| o.members.len() == 2).unwrap();
        let rep = induce_exact(&d4, &chars, orbit, &[RootPhase::one()]).to_float::<f64>();
        let report = imprimitivity_check(&d4, &chars, &rep, 1e-12);
        assert!(report.pass, "{:?}", report.failures);
        // the two orbit characters carry rank-one projections, the rest rank 0
        let mut ranks = report.projection_ranks.clone();
        ranks.sort();
        assert_eq!(ranks, vec![0, 0, 1, 1]);
        let total: usize = report.projection_ranks.iter().sum();
        assert_eq!(total, rep.dim);
    }

    #[test]
    fn imprimitivity_of_trivial_rep_concentrates_on_trivial_character() {
        let d4 = SemidirectProduct::d4();
        let chars = character_group(&d4.a).unwrap();
        let trivial = UnitaryRep::<f64> {
            dim: 1,
            mats: (0..d4.order()).map(|_| CMat::identity(1)).collect(),
        };
        let report = imprimitivity_check(&d4, &chars, &trivial, 1e-12);
        assert!(report.pass);
        let trivial_idx = chars
            .iter()
            .position(|c| c.values.iter().all(|p| p.is_one()))
            .unwrap();
        for (i, &rank) in report.projection_ranks.iter().enumerate() {
            assert_eq!(rank, usize::from(i == trivial_idx));
        }
    }

    #[test]
    fn invalid_tables_rejected() {
        // non-square
        assert!(FiniteGroup::from_table(&[vec![0, 1], vec![1]]).is_err());
        // no identity
        assert!(FiniteGroup::from_table(&[vec![1, 0], vec![0, 1]]).is_ok());
        assert!(FiniteGroup::from_table(&[vec![1, 1], vec![1, 1]]).is_err());
        // non-associative latin square (order 5 quasigroup)
        let q = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::from_table(&q).is_err());
    }
}

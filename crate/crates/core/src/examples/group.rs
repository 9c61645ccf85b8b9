use crate::error::GroupError;

/// A finite group given by its multiplication table over `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
    abelian: bool,
}

fn check_square(table: &[Vec<usize>]) -> Result<usize, GroupError> {
    let n = table.len();
    if n == 0 {
        return Err(GroupError::NotSquare { row: 0, len: 0, order: 0 });
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != n {
            return Err(GroupError::NotSquare { row, len: r.len(), order: n });
        }
        if let Some((col, &value)) = r.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(GroupError::OutOfRange { row, col, value, order: n });
        }
    }
    Ok(n)
}

/// Checks that `table` is an associative operation with a two-sided identity
/// and returns the identity.
pub fn validate_monoid(table: &[Vec<usize>]) -> Result<usize, GroupError> {
    let n = check_square(table)?;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(GroupError::NotAssociative(a, b, c));
                }
            }
        }
    }
    (0..n)
        .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or(GroupError::NoIdentity)
}

impl FiniteGroup {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let identity = validate_monoid(&table)?;
        let n = table.len();
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or(GroupError::NoInverse(a))?;
            inverses.push(inv);
        }
        let abelian = (0..n).all(|a| (0..n).all(|b| table[a][b] == table[b][a]));
        Ok(FiniteGroup { table, identity, inverses, abelian })
    }

    pub fn from_fn(n: usize, mul: impl Fn(usize, usize) -> usize) -> Result<Self, GroupError> {
        Self::new((0..n).map(|a| (0..n).map(|b| mul(a, b)).collect()).collect())
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        Self::from_fn(n, |a, b| (a + b) % n).expect("cyclic group")
    }

    /// The dihedral group of order `2n`: element `s^f r^k` is `f·n + k`.
    pub fn dihedral(n: usize) -> Self {
        Self::from_fn(2 * n, |a, b| {
            let (fa, ka) = (a / n, a % n);
            let (fb, kb) = (b / n, b % n);
            // r^ka s^fb = s^fb r^(±ka)
            let k = if fb == 0 { ka + kb } else { n - ka + kb };
            ((fa + fb) % 2) * n + k % n
        })
        .expect("dihedral group")
    }

    pub fn symmetric3() -> Self {
        Self::dihedral(3)
    }

    /// The quaternion group `{±1, ±i, ±j, ±k}`, with `2m + s` for sign `s`
    /// and unit `m ∈ {1, i, j, k}`.
    pub fn quaternion() -> Self {
        // Products of the units 1, i, j, k as (unit, sign flip).
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (1, 0), (2, 0), (3, 0)],
            [(1, 0), (0, 1), (3, 0), (2, 1)],
            [(2, 0), (3, 1), (0, 1), (1, 0)],
            [(3, 0), (2, 0), (1, 1), (0, 1)],
        ];
        Self::from_fn(8, |a, b| {
            let (u, f) = UNIT[a / 2][b / 2];
            2 * u + (a % 2 + b % 2 + f) % 2
        })
        .expect("quaternion group")
    }

    /// `G × H` with `(g, h) ↦ g·|H| + h`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let m = h.order();
        Self::from_fn(g.order() * m, |a, b| g.mul(a / m, b / m) * m + h.mul(a % m, b % m)).expect("direct product")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverses
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Sorted list of element orders.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.order()).map(|a| self.element_order(a)).collect();
        v.sort_unstable();
        v
    }

    /// A bijection `f` with `f(ab) = f(a)f(b)`, found by backtracking over
    /// order-preserving assignments.
    pub fn isomorphism_to(&self, other: &FiniteGroup) -> Option<Vec<usize>> {
        let n = self.order();
        if n != other.order() || self.order_profile() != other.order_profile() || self.abelian != other.abelian {
            return None;
        }
        let orders: Vec<usize> = (0..n).map(|a| self.element_order(a)).collect();
        let other_orders: Vec<usize> = (0..n).map(|a| other.element_order(a)).collect();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        map[self.identity] = other.identity;
        used[other.identity] = true;
        let order: Vec<usize> = (0..n).filter(|&a| a != self.identity).collect();
        if self.extend(other, &orders, &other_orders, &order, 0, &mut map, &mut used) {
            Some(map)
        } else {
            None
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        other: &FiniteGroup,
        orders: &[usize],
        other_orders: &[usize],
        todo: &[usize],
        k: usize,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some(&a) = todo.get(k) else {
            return true;
        };
        if map[a] != usize::MAX {
            return self.extend(other, orders, other_orders, todo, k + 1, map, used);
        }
        for b in 0..other.order() {
            if used[b] || orders[a] != other_orders[b] {
                continue;
            }
            let saved = map.to_vec();
            let saved_used = used.to_vec();
            map[a] = b;
            used[b] = true;
            if self.close(other, map, used) && self.extend(other, orders, other_orders, todo, k + 1, map, used) {
                return true;
            }
            map.copy_from_slice(&saved);
            used.copy_from_slice(&saved_used);
        }
        false
    }

    /// Propagates the partial map through products; fails on a conflict.
    fn close(&self, other: &FiniteGroup, map: &mut [usize], used: &mut [bool]) -> bool {
        let n = self.order();
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    if map[a] == usize::MAX || map[b] == usize::MAX {
                        continue;
                    }
                    let (ab, img) = (self.mul(a, b), other.mul(map[a], map[b]));
                    if map[ab] == usize::MAX {
                        if used[img] {
                            return false;
                        }
                        map[ab] = img;
                        used[img] = true;
                        changed = true;
                    } else if map[ab] != img {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    pub fn is_isomorphic(&self, other: &FiniteGroup) -> bool {
        self.isomorphism_to(other).is_some()
    }
}

/// Validates a table as a group.
pub fn finite_group(order: usize, table: Vec<Vec<usize>>) -> Result<FiniteGroup, GroupError> {
    if table.len() != order {
        return Err(GroupError::NotSquare { row: table.len(), len: table.len(), order });
    }
    FiniteGroup::new(table)
}

/// One representative of every isomorphism type of order at most 8.
pub fn small_groups() -> Vec<(&'static str, FiniteGroup)> {
    let z = FiniteGroup::cyclic;
    vec![
        ("Z1", z(1)),
        ("Z2", z(2)),
        ("Z3", z(3)),
        ("Z4", z(4)),
        ("Z2xZ2", FiniteGroup::direct_product(&z(2), &z(2))),
        ("Z5", z(5)),
        ("Z6", z(6)),
        ("S3", FiniteGroup::symmetric3()),
        ("Z7", z(7)),
        ("Z8", z(8)),
        ("Z4xZ2", FiniteGroup::direct_product(&z(4), &z(2))),
        ("Z2xZ2xZ2", FiniteGroup::direct_product(&FiniteGroup::direct_product(&z(2), &z(2)), &z(2))),
        ("D4", FiniteGroup::dihedral(4)),
        ("Q8", FiniteGroup::quaternion()),
    ]
}

//! Formula generators: seeded random formulas and exhaustive enumeration
//! by connective count.

use rand::Rng;

use crate::formula::{Connective, Formula, Logic};

fn connectives(logic: Logic) -> Vec<Connective> {
    let mut cs = vec![Connective::Neg, Connective::And, Connective::Or, Connective::Imp];
    if logic.has_consistency() {
        cs.insert(1, Connective::Cons);
    }
    cs
}

pub fn atoms(names: &[&str]) -> Vec<Formula> {
    names.iter().map(|n| Formula::var(n)).collect()
}

/// A random formula with exactly `size` connectives from the logic's signature.
pub fn random_formula_of_size<R: Rng + ?Sized>(rng: &mut R, logic: Logic, atoms: &[Formula], size: u32) -> Formula {
    let cs = connectives(logic);
    build(rng, &cs, atoms, size)
}

/// A random formula with between 0 and `max` connectives, size drawn uniformly.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, logic: Logic, atoms: &[Formula], max: u32) -> Formula {
    let size = rng.gen_range(0..=max);
    random_formula_of_size(rng, logic, atoms, size)
}

fn build<R: Rng + ?Sized>(rng: &mut R, cs: &[Connective], atoms: &[Formula], size: u32) -> Formula {
    if size == 0 {
        return atoms[rng.gen_range(0..atoms.len())].clone();
    }
    let c = cs[rng.gen_range(0..cs.len())];
    if c.arity() == 1 {
        Formula::unary(c, build(rng, cs, atoms, size - 1))
    } else {
        let left = rng.gen_range(0..size);
        let a = build(rng, cs, atoms, left);
        let b = build(rng, cs, atoms, size - 1 - left);
        Formula::binary(c, a, b)
    }
}

/// Every formula over `atoms` with at most `max` connectives, smallest first.
pub fn enumerate(logic: Logic, atoms: &[Formula], max: u32) -> Vec<Formula> {
    let cs = connectives(logic);
    let mut by_size: Vec<Vec<Formula>> = vec![atoms.to_vec()];
    for k in 1..=max as usize {
        let mut level = Vec::new();
        for &c in &cs {
            if c.arity() == 1 {
                level.extend(by_size[k - 1].iter().map(|a| Formula::unary(c, a.clone())));
            } else {
                for l in 0..k {
                    for a in &by_size[l] {
                        for b in &by_size[k - 1 - l] {
                            level.push(Formula::binary(c, a.clone(), b.clone()));
                        }
                    }
                }
            }
        }
        by_size.push(level);
    }
    by_size.concat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumeration_counts() {
        let pq = atoms(&["p", "q"]);
        // c_k = c_{k-1} + 3 * sum c_i c_{k-1-i}, c_0 = 2
        assert_eq!(enumerate(Logic::Cn(1), &pq, 2).len(), 2 + 14 + 182);
        let all = enumerate(Logic::Cila, &pq, 1);
        assert_eq!(all.len(), 2 + 4 + 12);
        assert!(all.iter().all(|f| f.connectives() <= 1));
    }

    #[test]
    fn random_is_seeded_and_in_signature() {
        let pq = atoms(&["p", "q"]);
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| random_formula(&mut rng, Logic::Cn(2), &pq, 10)).collect::<Vec<_>>()
        };
        let a = draw(7);
        assert_eq!(a, draw(7));
        assert!(a.iter().all(|f| f.connectives() <= 10 && !f.uses_consistency()));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(random_formula_of_size(&mut rng, Logic::MbCcl, &pq, 6).connectives(), 6);
    }
}

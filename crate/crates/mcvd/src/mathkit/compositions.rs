//! Weak compositions: ordered tuples of non-negative integers with a fixed
//! sum, enumerated lazily in lexicographic order (descending on the first
//! coordinate).

/// One weak composition of `n` into `len()` parts.
pub type WeakComposition = Vec<u32>;

/// Iterator over all weak compositions of `n` into `parts` non-negative
/// integers. Yields exactly `C(n + parts - 1, parts - 1)` tuples.
///
/// `parts = 0` yields the empty tuple when `n = 0` and nothing otherwise.
pub fn weak_compositions(n: u32, parts: usize) -> WeakCompositions {
    WeakCompositions {
        state: None,
        n,
        parts,
        done: false,
    }
}

/// Number of weak compositions of `n` into `parts` parts,
/// `C(n + parts - 1, parts - 1)`, computed exactly in u128.
pub fn weak_composition_count(n: u32, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(n == 0);
    }
    // C(n + parts - 1, parts - 1)
    let top = n as u128 + parts as u128 - 1;
    let k = (parts - 1) as u128;
    let k = k.min(top - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (top - i) / (i + 1);
    }
    acc
}

/// See [`weak_compositions`].
pub struct WeakCompositions {
    state: Option<Vec<u32>>,
    n: u32,
    parts: usize,
    done: bool,
}

impl Iterator for WeakCompositions {
    type Item = WeakComposition;

    fn next(&mut self) -> Option<WeakComposition> {
        if self.done {
            return None;
        }
        match &mut self.state {
            None => {
                if self.parts == 0 {
                    self.done = true;
                    return if self.n == 0 { Some(Vec::new()) } else { None };
                }
                let mut first = vec![0; self.parts];
                first[0] = self.n;
                self.state = Some(first.clone());
                Some(first)
            }
            Some(v) => {
                // successor: take one unit from the rightmost non-terminal
                // positive entry, push it (plus everything to its right) one
                // slot to the right
                let last = self.parts - 1;
                if v[last] == self.n {
                    self.done = true;
                    return None;
                }
                let j = (0..last).rev().find(|&j| v[j] > 0)?;
                v[j] -= 1;
                let rest: u32 = v[j + 1..].iter().sum::<u32>() + 1;
                v[j + 1..].iter_mut().for_each(|x| *x = 0);
                v[j + 1] = rest;
                Some(v.clone())
            }
        }
    }
}

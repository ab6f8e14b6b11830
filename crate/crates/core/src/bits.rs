//! Word-level helpers for fixed-width bit rows.

#[inline]
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub fn test(row: &[u64], i: usize) -> bool {
    row[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
pub fn set(row: &mut [u64], i: usize) {
    row[i >> 6] |= 1 << (i & 63);
}

#[inline]
pub fn clear(row: &mut [u64], i: usize) {
    row[i >> 6] &= !(1 << (i & 63));
}

#[inline]
pub fn count(row: &[u64]) -> usize {
    row.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub fn intersection_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

#[inline]
pub fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// Mask with bits `0..n` set, laid out over `words_for(n)` words.
pub fn full(n: usize) -> Vec<u64> {
    let mut row = vec![u64::MAX; words_for(n)];
    if n % 64 != 0 {
        if let Some(last) = row.last_mut() {
            *last = (1u64 << (n % 64)) - 1;
        }
    }
    row
}

/// Iterates the positions of set bits in ascending order.
pub fn ones(row: &[u64]) -> Ones<'_> {
    Ones {
        row,
        word: 0,
        current: row.first().copied().unwrap_or(0),
    }
}

pub struct Ones<'a> {
    row: &'a [u64],
    word: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
            if self.word >= self.row.len() {
                return None;
            }
            self.current = self.row[self.word];
        }
    }
}

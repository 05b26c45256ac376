/// Calls `f` on every `r`-subset of `items`, in lexicographic order of positions.
pub(crate) fn for_each_combination<T: Copy>(items: &[T], r: usize, mut f: impl FnMut(&[T])) {
    let n = items.len();
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut buf: Vec<T> = idx.iter().map(|&p| items[p]).collect();
    loop {
        f(&buf);
        let Some(pos) = (0..r).rev().find(|&p| idx[p] < n - r + p) else {
            return;
        };
        idx[pos] += 1;
        buf[pos] = items[idx[pos]];
        for p in pos + 1..r {
            idx[p] = idx[p - 1] + 1;
            buf[p] = items[idx[p]];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::binomial;

    #[test]
    fn lexicographic_and_complete() {
        let mut seen = Vec::new();
        for_each_combination(&[1, 2, 3, 4], 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
        let mut empty = 0;
        for_each_combination::<u8>(&[], 0, |c| {
            assert!(c.is_empty());
            empty += 1
        });
        assert_eq!(empty, 1);
        let mut none = 0;
        for_each_combination(&[1], 2, |_| none += 1);
        assert_eq!(none, 0);
        for n in 0..8usize {
            for r in 0..=n {
                let items: Vec<usize> = (0..n).collect();
                let mut count = 0u128;
                for_each_combination(&items, r, |_| count += 1);
                assert_eq!(count, binomial(n, r));
            }
        }
    }
}

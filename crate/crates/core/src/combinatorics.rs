//! Small subset enumeration helpers.

/// All `r`-element subsets of `items`, in lexicographic order of positions.
pub fn subsets_of_size(items: &[u32], r: usize) -> Vec<Vec<u32>> {
    let n = items.len();
    if r > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let Some(pos) = (0..r).rev().find(|&p| idx[p] != p + n - r) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_order() {
        let s = subsets_of_size(&[1, 2, 3, 4], 2);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0], vec![1, 2]);
        assert_eq!(s[5], vec![3, 4]);
        assert_eq!(subsets_of_size(&[1, 2], 0), vec![Vec::<u32>::new()]);
        assert!(subsets_of_size(&[1], 2).is_empty());
    }
}

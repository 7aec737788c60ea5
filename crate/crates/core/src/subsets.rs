//! The single subset ordering used everywhere: d-subsets of `{0, .., k-1}`
//! in lexicographic order of their sorted index tuples.

pub fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `d`-subsets of `0..k`, lexicographically ascending.
pub fn subsets(k: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(k, d));
    if d > k {
        return out;
    }
    let mut cur: Vec<usize> = (0..d).collect();
    loop {
        out.push(cur.clone());
        // rightmost index that can still move
        let mut i = d;
        while i > 0 && cur[i - 1] == k - d + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        cur[i - 1] += 1;
        for j in i..d {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// Position of `subset` (sorted, 0-based) in the lexicographic order.
pub fn subset_rank(subset: &[usize], k: usize) -> usize {
    let d = subset.len();
    let mut rank = 0;
    let mut prev = 0;
    for (i, &s) in subset.iter().enumerate() {
        for skipped in prev..s {
            rank += binomial(k - skipped - 1, d - i - 1);
        }
        prev = s + 1;
    }
    rank
}

/// Column label for a subset, using 1-based point indices: `v_1_2_4`.
pub fn subset_label(subset: &[usize]) -> String {
    let mut s = String::from("v");
    for &i in subset {
        s.push('_');
        s.push_str(&(i + 1).to_string());
    }
    s
}

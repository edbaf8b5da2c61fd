use std::collections::HashMap;

/// Least `R` such that every length-`R` window of `word` contains every
/// length-`len` factor of `word`.
///
/// For a factor with starts `s_1 < … < s_r` this is
/// `max(s_1 + len, s_{i+1} - s_i - 1 + len, N - s_r)`.
pub fn uniform_recurrence_window(word: &[u32], len: usize) -> usize {
    let n = word.len();
    if len == 0 || len > n {
        return 0;
    }
    let ids = factor_ids(word, len);
    // id -> (first start, last start, widest window so far)
    let mut seen: HashMap<u32, (usize, usize, usize)> = HashMap::new();
    for (start, &id) in ids.iter().enumerate() {
        seen.entry(id)
            .and_modify(|(_, last, widest)| {
                *widest = (*widest).max(start - *last - 1 + len);
                *last = start;
            })
            .or_insert((start, start, start + len));
    }
    seen.values().map(|&(_, last, widest)| widest.max(n - last)).max().unwrap_or(0)
}

/// `max_{1 <= l <= max_len}` of [`uniform_recurrence_window`].
pub fn uniform_recurrence(word: &[u32], max_len: usize) -> usize {
    (1..=max_len).map(|l| uniform_recurrence_window(word, l)).max().unwrap_or(0)
}

/// Ids for the length-`len` factors, equal iff the factors are equal.
fn factor_ids(word: &[u32], len: usize) -> Vec<u32> {
    let mut ids: Vec<u32> = word.to_vec();
    for l in 2..=len {
        let mut table: HashMap<(u32, u32), u32> = HashMap::new();
        ids = (0..word.len() + 1 - l)
            .map(|i| {
                let fresh = table.len() as u32;
                *table.entry((ids[i], word[i + l - 1])).or_insert(fresh)
            })
            .collect();
    }
    ids
}

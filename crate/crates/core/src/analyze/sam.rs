//! Suffix automaton over `u32` symbols.

pub(crate) struct State {
    pub len: usize,
    pub link: Option<usize>,
    // Few distinct letters per state, so a flat list beats a map.
    next: Vec<(u32, usize)>,
    /// Smallest and largest end positions of this state's factors.
    pub first_end: usize,
    pub last_end: usize,
}

impl State {
    fn get(&self, c: u32) -> Option<usize> {
        self.next.iter().find(|(d, _)| *d == c).map(|&(_, t)| t)
    }

    fn set(&mut self, c: u32, target: usize) {
        match self.next.iter_mut().find(|(d, _)| *d == c) {
            Some(slot) => slot.1 = target,
            None => self.next.push((c, target)),
        }
    }
}

pub(crate) struct SuffixAutomaton {
    pub states: Vec<State>,
}

impl SuffixAutomaton {
    pub fn build(word: &[u32]) -> Self {
        let mut states = Vec::with_capacity(2 * word.len() + 1);
        states.push(State { len: 0, link: None, next: Vec::new(), first_end: 0, last_end: 0 });
        let mut last = 0usize;
        for (pos, &c) in word.iter().enumerate() {
            let cur = states.len();
            states.push(State { len: states[last].len + 1, link: None, next: Vec::new(), first_end: pos, last_end: pos });
            let mut p = Some(last);
            while let Some(q) = p {
                if states[q].get(c).is_some() {
                    break;
                }
                states[q].set(c, cur);
                p = states[q].link;
            }
            match p {
                None => states[cur].link = Some(0),
                Some(p) => {
                    let q = states[p].get(c).expect("transition exists");
                    if states[p].len + 1 == states[q].len {
                        states[cur].link = Some(q);
                    } else {
                        let clone = states.len();
                        let copy = State {
                            len: states[p].len + 1,
                            link: states[q].link,
                            next: states[q].next.clone(),
                            first_end: states[q].first_end,
                            last_end: states[q].last_end,
                        };
                        states.push(copy);
                        let mut r = Some(p);
                        while let Some(x) = r {
                            if states[x].get(c) != Some(q) {
                                break;
                            }
                            states[x].set(c, clone);
                            r = states[x].link;
                        }
                        states[q].link = Some(clone);
                        states[cur].link = Some(clone);
                    }
                }
            }
            last = cur;
        }
        // Propagate the largest end position up the suffix-link tree.
        let mut order: Vec<usize> = (1..states.len()).collect();
        order.sort_unstable_by_key(|&v| std::cmp::Reverse(states[v].len));
        for v in order {
            if let Some(l) = states[v].link {
                if l != 0 {
                    states[l].last_end = states[l].last_end.max(states[v].last_end);
                }
            }
        }
        SuffixAutomaton { states }
    }

    /// `counts[n]` = number of distinct factors of length `n`, `1 <= n <= max_len`.
    pub fn counts(&self, max_len: usize) -> Vec<u64> {
        let mut diff = vec![0i64; max_len + 2];
        for v in self.states.iter().skip(1) {
            let lo = self.states[v.link.expect("non-root state has a link")].len + 1;
            let hi = v.len.min(max_len);
            if lo <= hi {
                diff[lo] += 1;
                diff[hi + 1] -= 1;
            }
        }
        let mut out = vec![0u64; max_len + 1];
        let mut run = 0i64;
        for n in 1..=max_len {
            run += diff[n];
            out[n] = run as u64;
        }
        out
    }
}

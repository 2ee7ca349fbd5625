//! Brute-force reference evaluators for the answer-scoring metrics,
//! written directly from the metric formulas with naive list scans and
//! no shared code with the library. Tests compare the production
//! implementations against these.

/// Whitespace tokens.
fn toks(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// All n-grams of `items` as owned vectors, in order.
fn ngrams<T: Clone>(items: &[T], n: usize) -> Vec<Vec<T>> {
    if n == 0 || items.len() < n {
        return Vec::new();
    }
    (0..=items.len() - n)
        .map(|i| items[i..i + n].to_vec())
        .collect()
}

/// Clipped match count: each hypothesis n-gram may consume one equal
/// reference n-gram. Quadratic on purpose.
fn clipped_matches<T: PartialEq + Clone>(hyp: &[Vec<T>], reference: &[Vec<T>]) -> usize {
    let mut used = vec![false; reference.len()];
    let mut matches = 0;
    for gram in hyp {
        for (j, candidate) in reference.iter().enumerate() {
            if !used[j] && candidate == gram {
                used[j] = true;
                matches += 1;
                break;
            }
        }
    }
    matches
}

/// BLEU with the min(1, length-ratio) penalty: the geometric mean of
/// clipped n-gram precisions over the orders the hypothesis is long
/// enough to have, scaled by min(1, |hyp|/|ref|) and 100.
pub fn bleu(hyp: &str, reference: &str, max_n: usize, add_one_smoothing: bool) -> f64 {
    let h = toks(hyp);
    let r = toks(reference);
    assert!(!r.is_empty(), "oracle precondition: nonempty reference");
    if h.is_empty() {
        return 0.0;
    }
    let mut product = 1.0_f64;
    let mut orders = 0u32;
    for n in 1..=max_n {
        let hyp_grams = ngrams(&h, n);
        if hyp_grams.is_empty() {
            continue;
        }
        let ref_grams = ngrams(&r, n);
        let matched = clipped_matches(&hyp_grams, &ref_grams);
        let p = if add_one_smoothing && n > 1 {
            (matched + 1) as f64 / (hyp_grams.len() + 1) as f64
        } else {
            matched as f64 / hyp_grams.len() as f64
        };
        product *= p;
        orders += 1;
    }
    let ratio = (h.len() as f64 / r.len() as f64).min(1.0);
    100.0 * ratio * product.powf(1.0 / orders as f64)
}

pub fn bleu_1(hyp: &str, reference: &str) -> f64 {
    bleu(hyp, reference, 1, false)
}

/// chrF: for each character n-gram order with at least one reference
/// n-gram, F = (1+beta^2)*P*R / (beta^2*P + R); the score is 100 times
/// the arithmetic mean of the per-order F values.
pub fn chrf(hyp: &str, reference: &str, beta: f64, max_n: usize, ignore_whitespace: bool) -> f64 {
    let keep = |text: &str| -> Vec<char> {
        text.chars()
            .filter(|c| !(ignore_whitespace && c.is_whitespace()))
            .collect()
    };
    let h = keep(hyp);
    let r = keep(reference);
    assert!(!r.is_empty(), "oracle precondition: nonempty reference");
    let mut sum = 0.0;
    let mut orders = 0u32;
    for n in 1..=max_n {
        let ref_grams = ngrams(&r, n);
        if ref_grams.is_empty() {
            continue;
        }
        orders += 1;
        let hyp_grams = ngrams(&h, n);
        let matched = clipped_matches(&hyp_grams, &ref_grams) as f64;
        let precision = if hyp_grams.is_empty() {
            0.0
        } else {
            matched / hyp_grams.len() as f64
        };
        let recall = matched / ref_grams.len() as f64;
        let denominator = beta * beta * precision + recall;
        if denominator > 0.0 {
            sum += (1.0 + beta * beta) * precision * recall / denominator;
        }
    }
    100.0 * sum / orders as f64
}

/// Exact-match METEOR: greedy leftmost unigram alignment, the
/// alpha-weighted harmonic mean of precision and recall, and the
/// gamma * (chunks/matches)^beta fragmentation penalty.
pub fn meteor(hyp: &str, reference: &str, alpha: f64, gamma: f64, penalty_beta: f64) -> f64 {
    let h = toks(hyp);
    let r = toks(reference);
    assert!(!r.is_empty(), "oracle precondition: nonempty reference");
    if h.is_empty() {
        return 0.0;
    }
    let mut used = vec![false; r.len()];
    let mut alignment: Vec<(usize, usize)> = Vec::new();
    for (i, token) in h.iter().enumerate() {
        for (j, candidate) in r.iter().enumerate() {
            if !used[j] && candidate == token {
                used[j] = true;
                alignment.push((i, j));
                break;
            }
        }
    }
    let m = alignment.len();
    if m == 0 {
        return 0.0;
    }
    let precision = m as f64 / h.len() as f64;
    let recall = m as f64 / r.len() as f64;
    let fmean = precision * recall / (alpha * precision + (1.0 - alpha) * recall);
    let mut chunks = 0usize;
    for (k, &(i, j)) in alignment.iter().enumerate() {
        if k == 0 || alignment[k - 1].0 + 1 != i || alignment[k - 1].1 + 1 != j {
            chunks += 1;
        }
    }
    let penalty = gamma * (chunks as f64 / m as f64).powf(penalty_beta);
    100.0 * fmean * (1.0 - penalty)
}

/// Every token sequence of length 0..=max_len over the alphabet, as
/// space-joined strings.
pub fn all_sequences(alphabet: &[&str], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier: Vec<Vec<&str>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &frontier {
            for symbol in alphabet {
                let mut extended = seq.clone();
                extended.push(symbol);
                out.push(extended.join(" "));
                next.push(extended);
            }
        }
        frontier = next;
    }
    out
}

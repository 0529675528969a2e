//! Text renderings of the window: an indented ASCII tree rooted at the
//! deepest main-branch word, and a DOT digraph with one creation edge per
//! letter. Weights can be attached to the edge labels.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::tree::{enumerate_window, left_create, TreeWord, Window};
use crate::weights::{WeightError, WeightRule};
use crate::words::{InfiniteWord, Letter};

fn creation_edges(
    window: &Window,
    n: u32,
    omega: &InfiniteWord,
) -> (Vec<TreeWord>, Vec<(TreeWord, Letter, TreeWord)>) {
    let words = enumerate_window(window, n, omega);
    let mut edges = Vec::new();
    for u in &words {
        for i in 1..=n {
            let i = Letter::new(i).expect("valid letter");
            let image = left_create(i, u, omega);
            if window.contains(&image) {
                edges.push((u.clone(), i, image));
            }
        }
    }
    (words, edges)
}

fn edge_label(
    i: Letter,
    target: &TreeWord,
    labels: Option<&WeightRule>,
    omega: &InfiniteWord,
) -> Result<String, WeightError> {
    let mut s = String::new();
    match labels {
        Some(rule) => {
            let _ = write!(s, "{} ({})", i, rule.evaluate(target, omega)?);
        }
        None => {
            let _ = write!(s, "{}", i);
        }
    }
    Ok(s)
}

/// Indented tree, one line per window word. Within a window the creation
/// edges form a spanning tree rooted at the deepest main-branch word
/// (every word is created from exactly one in-window word), so a plain
/// depth-first walk prints each word once. Main-branch words are marked
/// with `*`.
pub fn render_tree_ascii(
    window: &Window,
    n: u32,
    omega: &InfiniteWord,
    labels: Option<&WeightRule>,
) -> Result<String, WeightError> {
    let (words, edges) = creation_edges(window, n, omega);
    let mut children: BTreeMap<TreeWord, Vec<(Letter, TreeWord)>> = BTreeMap::new();
    for (u, i, image) in edges {
        children.entry(u).or_default().push((i, image));
    }
    let root = TreeWord::main_branch(window.max_neg);
    let mut out = String::new();
    let mut stack = alloc::vec![(root, 0usize, None::<Letter>)];
    let mut printed = 0usize;
    while let Some((u, indent, via)) = stack.pop() {
        for _ in 0..indent {
            out.push_str("  ");
        }
        if let Some(i) = via {
            let label = edge_label(i, &u, labels, omega)?;
            let _ = write!(out, "-{}-> ", label);
        } else {
            out.push_str("root ");
        }
        let _ = write!(out, "{}", u);
        if u.positive().is_empty() {
            out.push('*');
        }
        out.push('\n');
        printed += 1;
        if let Some(kids) = children.get(&u) {
            for (i, child) in kids.clone().into_iter().rev() {
                stack.push((child, indent + 1, Some(i)));
            }
        }
    }
    debug_assert_eq!(printed, words.len());
    Ok(out)
}

/// DOT digraph: one vertex per window word, one edge per in-window
/// creation. Main-branch vertices are drawn doubled.
pub fn render_tree_dot(
    window: &Window,
    n: u32,
    omega: &InfiniteWord,
    labels: Option<&WeightRule>,
) -> Result<String, WeightError> {
    let (words, edges) = creation_edges(window, n, omega);
    let mut out = String::new();
    out.push_str("digraph fock_window {\n");
    out.push_str("  rankdir=BT;\n");
    for u in &words {
        if u.positive().is_empty() {
            let _ = writeln!(out, "  \"{}\" [peripheries=2];", u);
        } else {
            let _ = writeln!(out, "  \"{}\";", u);
        }
    }
    for (u, i, image) in &edges {
        let label = edge_label(*i, image, labels, omega)?;
        let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{}\"];", u, image, label);
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::FiniteWord;

    fn om(s: &str) -> InfiniteWord {
        InfiniteWord::periodic(FiniteWord::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn ascii_lists_every_window_word() {
        let window = Window::new(1, 1);
        let text = render_tree_ascii(&window, 2, &om("2"), None).unwrap();
        // the window of the five-vertex figure: phi, 2^{-1}, 1, 2, 12^{-1}
        assert_eq!(text.lines().count(), 5);
        for u in ["|0", "|1", "1|0", "2|0", "1|1"] {
            assert!(text.contains(u), "{} missing in:\n{}", u, text);
        }
        assert!(text.contains("|0*"));
    }

    #[test]
    fn dot_shape() {
        let window = Window::new(2, 2);
        let dot = render_tree_dot(&window, 2, &om("12"), None).unwrap();
        assert!(dot.starts_with("digraph"));
        assert!(dot.trim_end().ends_with('}'));
        let vertex_count = dot.lines().filter(|l| l.contains(';') && !l.contains("->") && !l.contains("rankdir")).count();
        assert_eq!(
            vertex_count,
            enumerate_window(&window, 2, &om("12")).len()
        );
        // braces balanced and every edge labelled
        for l in dot.lines().filter(|l| l.contains("->")) {
            assert!(l.contains("label="));
        }
    }

    #[test]
    fn weighted_labels_appear() {
        let rule = WeightRule::Constant(crate::scalar::Scalar::from_ratio(1, 2));
        let dot = render_tree_dot(&Window::new(1, 1), 2, &om("2"), Some(&rule)).unwrap();
        assert!(dot.contains("(1/2)"));
        let text = render_tree_ascii(&Window::new(1, 1), 2, &om("2"), Some(&rule)).unwrap();
        assert!(text.contains("(1/2)"));
    }
}

use snsq_core::Rational;

/// Right-aligned square table with entity names on both axes.
pub fn render(names: &[&str], cells: &[Vec<Rational>]) -> String {
    let body: Vec<Vec<String>> = cells.iter().map(|row| row.iter().map(Rational::to_string).collect()).collect();
    let label_width = names.iter().map(|n| n.chars().count()).max().unwrap_or(0);
    let width = body
        .iter()
        .flatten()
        .map(|s| s.chars().count())
        .chain(names.iter().map(|n| n.chars().count()))
        .max()
        .unwrap_or(0);

    let mut out = String::new();
    out.push_str(&" ".repeat(label_width));
    for name in names {
        out.push_str(&format!(" {name:>width$}"));
    }
    out.push('\n');
    for (name, row) in names.iter().zip(&body) {
        out.push_str(&format!("{name:<label_width$}"));
        for cell in row {
            out.push_str(&format!(" {cell:>width$}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_align() {
        let cells =
            vec![vec![Rational::new(1, 10).unwrap(), Rational::zero()], vec![Rational::zero(), Rational::integer(8)]];
        assert_eq!(render(&["i", "jj"], &cells), "      i   jj\ni  1/10    0\njj    0    8\n");
    }
}

//! Shared report plumbing: schema version and small format helpers.

/// Version stamp carried by every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// Render a `length,count` histogram as CSV, ascending by length.
pub fn histogram_csv<I>(rows: I) -> String
where
    I: IntoIterator<Item = (u64, u64)>,
{
    let mut out = String::from("length,count\n");
    for (length, count) in rows {
        out.push_str(&format!("{length},{count}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let csv = histogram_csv([(1, 10), (16, 2)]);
        assert_eq!(csv, "length,count\n1,10\n16,2\n");
    }
}

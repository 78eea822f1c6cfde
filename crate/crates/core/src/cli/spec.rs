use std::path::Path;

use serde::{Deserialize, Serialize};

use super::expr::parse_jet;
use crate::error::{Error, Result};
use crate::geometry::ChartGeometry;
use crate::jets::{Jet, JetMatrix, MAX_DIM};

/// Chart description as read from a geometry file.
///
/// `omega` needs only the entries above the diagonal; `null` entries on or
/// below it are filled in by antisymmetry. `J[row][col]` is `J^row_col`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub dimension: usize,
    pub jet_order: u32,
    pub omega: Vec<Vec<Option<String>>>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<String>>,
}

pub const BUNDLED: [(&str, &str); 4] = [
    ("flat2d", include_str!("../../corpus/flat2d.json")),
    ("flat_c2", include_str!("../../corpus/flat_c2.json")),
    ("kahler2d", include_str!("../../corpus/kahler2d.json")),
    ("nonintegrable4d", include_str!("../../corpus/nonintegrable4d.json")),
];

impl GeometrySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GeometrySpec =
            serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
        spec.check_shape()?;
        Ok(spec)
    }

    pub fn bundled(name: &str) -> Option<Self> {
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| GeometrySpec::from_json(text).expect("bundled chart parses"))
    }

    pub fn all_bundled() -> Vec<Self> {
        BUNDLED
            .iter()
            .map(|(_, text)| GeometrySpec::from_json(text).expect("bundled chart parses"))
            .collect()
    }

    /// Read a geometry file; a path that does not exist but whose file stem
    /// names a bundled chart resolves to that chart.
    pub fn load(path: &Path) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => GeometrySpec::from_json(&text),
            Err(e) => {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
                if !path.exists() {
                    if let Some(spec) = GeometrySpec::bundled(stem) {
                        return Ok(spec);
                    }
                }
                Err(Error::Io(format!("{}: {e}", path.display())))
            }
        }
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.dimension;
        if n == 0 || n % 2 != 0 || n > MAX_DIM {
            return Err(Error::MalformedInput(format!(
                "dimension {n} must be even, positive and at most {MAX_DIM}"
            )));
        }
        let square = |lens: Vec<usize>| lens.len() == n && lens.iter().all(|&c| c == n);
        if !square(self.omega.iter().map(Vec::len).collect()) {
            return Err(Error::MalformedInput(format!("omega must be {n}x{n}")));
        }
        if !square(self.j.iter().map(Vec::len).collect()) {
            return Err(Error::MalformedInput(format!("J must be {n}x{n}")));
        }
        for (a, row) in self.omega.iter().enumerate() {
            for (b, entry) in row.iter().enumerate() {
                if a < b && entry.is_none() {
                    return Err(Error::MalformedInput(format!(
                        "omega[{}][{}] is required",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Lower to jets at the file's order, or at `order` when given.
    pub fn to_chart(&self, order: Option<u32>) -> Result<ChartGeometry> {
        let n = self.dimension;
        let k = order.unwrap_or(self.jet_order);
        let entry = |text: &str, what: &str, a: usize, b: usize| {
            parse_jet(text, n, k).map_err(|e| {
                Error::MalformedInput(format!("{what}[{}][{}]: {e}", a + 1, b + 1))
            })
        };
        let mut omega = vec![vec![Jet::zero(n, k); n]; n];
        for a in 0..n {
            for b in 0..n {
                if let Some(text) = &self.omega[a][b] {
                    omega[a][b] = entry(text, "omega", a, b)?;
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                if self.omega[a][b].is_none() {
                    omega[a][b] = -&omega[b][a];
                }
            }
        }
        let j = (0..n)
            .map(|a| (0..n).map(|b| entry(&self.j[a][b], "J", a, b)).collect())
            .collect::<Result<Vec<Vec<Jet>>>>()?;
        ChartGeometry::new(
            self.name.clone(),
            JetMatrix::from_rows(omega)?,
            JetMatrix::from_rows(j)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_chart;

    #[test]
    fn bundled_charts_are_valid() {
        for spec in GeometrySpec::all_bundled() {
            let chart = spec.to_chart(None).unwrap();
            assert_eq!(chart.dim(), spec.dimension);
            validate_chart(&chart).unwrap_or_else(|e| panic!("{}: {e}", spec.name));
        }
    }

    #[test]
    fn antisymmetry_fill() {
        let spec = GeometrySpec::bundled("kahler2d").unwrap();
        let chart = spec.to_chart(Some(3)).unwrap();
        assert_eq!(chart.omega.get(1, 0), &(-chart.omega.get(0, 1)));
        assert_eq!(chart.order(), 3);
    }

    #[test]
    fn missing_upper_entry_rejected() {
        let text = r#"{"name":"x","dimension":2,"jet_order":2,
            "omega":[[null,null],[null,null]],"J":[["0","1"],["-1","0"]]}"#;
        assert!(matches!(GeometrySpec::from_json(text), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn bad_expression_names_the_entry() {
        let text = r#"{"name":"x","dimension":2,"jet_order":2,
            "omega":[[null,"1+"],[null,null]],"J":[["0","1"],["-1","0"]]}"#;
        let err = GeometrySpec::from_json(text).unwrap().to_chart(None).unwrap_err();
        assert!(err.to_string().contains("omega[1][2]"), "{err}");
    }

    #[test]
    fn missing_path_falls_back_to_bundled() {
        let spec = GeometrySpec::load(Path::new("examples/flat_c2.json")).unwrap();
        assert_eq!(spec.name, "flat_c2");
        assert!(matches!(
            GeometrySpec::load(Path::new("nowhere/unknown.json")),
            Err(Error::Io(_))
        ));
    }
}

use crate::dataset::{Column, ColumnKind, Dataset, Label};

/// Borrowed attribute column prepared for induction.
pub(crate) enum AttrData<'a> {
    Numeric(&'a [f64]),
    Nominal {
        codes: &'a [u32],
        categories: &'a [String],
    },
}

pub(crate) struct AttrView<'a> {
    pub name: &'a str,
    pub data: AttrData<'a>,
}

/// Columnar view of a dataset restricted to a set of attributes. The
/// attribute order is the induction iteration order, which fixes the
/// equal-score tie-break.
pub(crate) struct TrainingView<'a> {
    pub attrs: Vec<AttrView<'a>>,
    pub labels: &'a [Label],
}

impl<'a> TrainingView<'a> {
    /// View over all attributes, in schema order.
    pub fn all(d: &'a Dataset) -> TrainingView<'a> {
        let positions: Vec<usize> = d.schema().attribute_positions().collect();
        Self::masked(d, &positions)
    }

    /// View over the attributes at `positions`, in the given order.
    pub fn masked(d: &'a Dataset, positions: &[usize]) -> TrainingView<'a> {
        let attrs = positions
            .iter()
            .map(|&p| {
                let meta = d.schema().column(p);
                debug_assert!(meta.kind != ColumnKind::Label);
                let data = match d.column(p) {
                    Column::Numeric(v) => AttrData::Numeric(v),
                    Column::Nominal(c) => AttrData::Nominal {
                        codes: c.codes(),
                        categories: c.vocab(),
                    },
                    Column::Label(_) => unreachable!("label excluded from attribute positions"),
                };
                AttrView {
                    name: &meta.name,
                    data,
                }
            })
            .collect();
        TrainingView {
            attrs,
            labels: d.labels(),
        }
    }

}

use nalgebra::DMatrix;

/// Singular values (descending, zero-padded to the column count) and the
/// matching right singular vectors as the columns of `v`.
pub(crate) struct RightSvd {
    pub values: Vec<f64>,
    pub v: DMatrix<f64>,
}

/// Right-sided SVD that always yields a full `cols x cols` basis. Tall inputs
/// are reduced by QR first; wide inputs are padded with zero rows.
pub(crate) fn right_svd(m: &DMatrix<f64>) -> RightSvd {
    let (rows, cols) = m.shape();
    let square = if rows > cols {
        m.clone().qr().r()
    } else if rows < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = DMatrix::from_fn(cols, cols, |r, c| v_t[(order[c], r)]);
    RightSvd { values, v }
}

/// Orthonormal basis for the column space of a full-column-rank matrix.
pub(crate) fn orthonormal_columns(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

pub(crate) fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| (a[(i, j)] - a[(j, i)]).abs()).fold(0.0, f64::max)
}

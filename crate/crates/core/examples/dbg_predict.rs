use cvqrnn_core::datasets::{generate_series, SeriesKind};
use cvqrnn_core::gates::LayerParams;
use cvqrnn_core::qrnn::{QRNNConfig, QrnnModel};
use cvqrnn_core::training::TrainableModel;

fn main() {
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string("/tmp/smoke1/manifest.json").unwrap())
            .unwrap();
    let flat: Vec<f64> = manifest["final_params"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let params = LayerParams::from_flat(2, &flat).unwrap();
    let cfg = QRNNConfig { n1: 1, n2: 1, cutoff: 6, window: 4, forecast_len: 0, encoding_scale: 1.0 };
    let ds = generate_series(SeriesKind::Bessel, 200, (0.0, 8.0 * std::f64::consts::PI), 4).unwrap();
    let model = QrnnModel::new(params, cfg).unwrap();
    // window 2 (index 1)
    let w = &ds.train_windows[1];
    let p_fresh = model.predict(&w.input).unwrap().value;
    println!("fresh cell:   {:.17e}", p_fresh);
    // now simulate a warm cache from a batch pass over many windows, then predict
    let many: Vec<Vec<f64>> = ds.train_windows.iter().take(30).map(|w| w.input.clone()).collect();
    let _ = model.predict_batch(&many).unwrap();
    let p_warm = model.predict(&w.input).unwrap().value;
    println!("after batch:  {:.17e}", p_warm);
    // batch-path prediction (shared cell)
    let batch = model.predict_batch(&[ds.train_windows[0].input.clone(), w.input.clone()]).unwrap();
    println!("batch shared: {:.17e}", batch[1].value);
}

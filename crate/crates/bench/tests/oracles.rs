mod common;

use common::*;

#[test]
fn visibility_oracle_detours_around_a_box() {
    let ob = vec![vec![[-0.5, 0.5], [-0.5, 0.5]]];
    let bounds = [[-2.0, 2.0], [-2.0, 2.0]];
    // from (-1, 0) to (1, 0) the optimum runs over both top corners
    let d = visibility_optimum(&ob, &bounds, &[-1.0, 0.0], &[1.0, 0.0]);
    let expected = 2.0 * (0.25f64 + 0.25).sqrt() + 1.0;
    assert!((d - expected).abs() < 1e-12, "{d} vs {expected}");
    // a clear line of sight is the straight segment
    let d = visibility_optimum(&ob, &bounds, &[-1.0, 1.0], &[1.0, 1.0]);
    assert!((d - 2.0).abs() < 1e-12);
}

#[test]
fn grazing_a_face_is_free() {
    let ob = vec![[0.0, 1.0], [0.0, 1.0]];
    assert!(!segment_hits_box(&[-1.0, 1.0], &[2.0, 1.0], &ob));
    assert!(segment_hits_box(&[-1.0, 0.5], &[2.0, 0.5], &ob));
    assert!(!segment_hits_box(&[-1.0, -1.0], &[0.0, 0.0], &ob));
    assert!(segment_hits_box(&[-1.0, -1.0], &[0.5, 0.5], &ob));
}

#[test]
fn dijkstra_on_a_square() {
    let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    let adj = vec![vec![1, 3], vec![0, 2], vec![1, 3], vec![0, 2]];
    assert_eq!(dijkstra(&adj, &pts, 0, 2), 2.0);
    assert_eq!(k_nearest(2, 2), 1);
}

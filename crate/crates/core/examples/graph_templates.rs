//! Tree templates on weighted graphs: the color-coding dynamic program,
//! compared with brute force, and a two-template isomorphism test.

use maxfilt::graphs::{
    brute_force_tree_filter, graph_isomorphism_certificate, make_color_coding, mf_tree_dp, TreeTemplate,
    WeightedGraph,
};

fn main() -> maxfilt::Result<()> {
    let p4 = TreeTemplate::path(4);
    let hexagon = WeightedGraph::cycle(6);
    let triangles = WeightedGraph::cycle(3).disjoint_union(&WeightedGraph::cycle(3));
    let coding = make_color_coding(6, 4, 7)?;
    println!("color coding: {} colorings, rainbow verified: {}", coding.colorings.len(), coding.verified);
    for (name, g) in [("C6", &hexagon), ("C3 + C3", &triangles)] {
        let dp = mf_tree_dp(&p4, g, &coding)?;
        println!(
            "P4 on {name:>7}: dp {} ({} ops), brute force {}",
            dp.value,
            dp.ops,
            brute_force_tree_filter(&p4, g)?
        );
    }
    // isomorphism: ||A||^2 = <<[A],[B]>> = ||B||^2
    let shuffled = hexagon.relabel(&[2, 4, 0, 5, 1, 3])?;
    println!("C6 vs shuffled C6: {:?}", graph_isomorphism_certificate(&hexagon, &shuffled)?);
    println!("C6 vs C3 + C3:     {:?}", graph_isomorphism_certificate(&hexagon, &triangles)?);
    Ok(())
}

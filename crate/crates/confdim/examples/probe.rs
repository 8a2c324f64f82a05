use confdim::partition::PartitionFamily;
use confdim::tree::Address;

fn main() {
    let fam = PartitionFamily::sierpinski_carpet(5);
    let w = Address::from_digits(&[0, 4]);
    println!("in tree: {}", fam.is_in_tree(&w));
    println!("ambient neighbors: {:?}", fam.ambient_neighbors(&w));
    println!("witness depth: {:?}", fam.interior_witness_depth(&w));
    // check a child's intersection with the bottom neighbor
    let child = Address::from_digits(&[0, 4, 0]);
    let bottom = Address::from_digits(&[0, 3]);
    println!("child {:?} rect {:?}", child, fam.ambient_rect(&child));
    println!("bottom {:?} rect {:?}", bottom, fam.ambient_rect(&bottom));
    println!("intersects(child, bottom): {:?}", fam.intersects(&child, &bottom));
}

// Writes the synthetic test objects and the default hand file into a data
// directory: <dir>/objects/<name>.obj and <dir>/hands/default.hand.

#include "grasp/hand_io.hpp"
#include "grasp/mesh_io.hpp"
#include "grasp/objects.hpp"
#include "grasp/results_io.hpp"

#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: grasp_assets <data-dir>\n";
    return 1;
  }
  namespace fs = std::filesystem;
  try {
    const fs::path dir(argv[1]);
    fs::create_directories(dir / "objects");
    fs::create_directories(dir / "hands");
    for (const auto& name : grasp::synthetic_object_names()) {
      grasp::save_obj(dir / "objects" / (name + ".obj"), grasp::make_synthetic_object(name));
    }
    grasp::write_text_file(dir / "hands" / "default.hand", grasp::default_hand_description());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

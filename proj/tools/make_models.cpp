// Writes the bundled example models: make_models [DIR] (default: models).

#include "igabem/model_io.hpp"
#include "igabem/models.hpp"

#include <filesystem>
#include <iostream>

int main(int argc, char** argv)
{
    using namespace igabem;
    const std::filesystem::path dir = argc > 1 ? argv[1] : "models";
    try {
        std::filesystem::create_directories(dir);
        save_model(tunnel_elastic_model(), (dir / "tunnel_elastic.model").string());
        save_model(tunnel_bolts_model(), (dir / "tunnel_bolts.model").string());
        save_model(tunnel_plastic_model(), (dir / "tunnel_plastic.model").string());
    } catch (const std::exception& e) {
        std::cerr << "make_models: " << e.what() << '\n';
        return 1;
    }
    std::cout << "models written to " << dir.string() << '\n';
    return 0;
}

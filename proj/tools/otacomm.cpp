#include "otacomm/experiment.hpp"

int main(int argc, char** argv) {
    return otacomm::cli_main(argc, argv);
}

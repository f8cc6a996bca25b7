#include "tvf/cli/cli.hpp"

int main(int argc, char** argv) {
    return tvf::cli::run_cli(argc, argv);
}

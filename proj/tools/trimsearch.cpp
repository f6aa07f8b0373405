#include "trimsearch/cli/cli.hpp"

int main(int argc, char** argv) {
    return trimsearch::cli::run(argc, argv);
}

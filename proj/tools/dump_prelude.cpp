// Writes the shipped prelude.qpcf and grover3.gates next to the binaries so
// they can be inspected and loaded by external tools.

#include <fstream>
#include <iostream>
#include <string>

#include "qpcf/prelude.hpp"

int main(int argc, char** argv) {
    std::string dir = argc > 1 ? argv[1] : ".";
    {
        std::ofstream out(dir + "/prelude.qpcf");
        out << qpcf::prelude_source();
    }
    {
        std::ofstream out(dir + "/grover3.gates");
        out << qpcf::grover3_gate_text();
    }
    std::cout << "wrote " << dir << "/prelude.qpcf and " << dir << "/grover3.gates\n";
    return 0;
}

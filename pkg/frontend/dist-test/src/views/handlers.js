// The views stay pure: every gesture goes through this interface. The
// browser entry point wires it to the controller plus window.prompt; tests
// plug in spies.
export {};

// Payload shapes of the schemabuilder HTTP API.
export {};
